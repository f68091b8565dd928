//! Software reference model of a systematic Reed–Solomon encoder.
//!
//! An RS(n, k) code over GF(2^a) carries a k-word message
//! m(x) = m₀ + m₁x + … + m₍k₋₁₎x^(k−1) and appends n−k parity words: the
//! remainder of m(x)·x^(n−k) divided by the generator polynomial g(x), whose
//! roots are α¹ … α^(n−k). The codeword is the message concatenated with the
//! parity, and evaluating it at each generator root yields zero.
//!
//! Word-list convention: the first word of a message slice is m₀ (the
//! constant coefficient) and the first returned parity word is p₀, matching
//! the usual printed tuples. Internally the division feeds coefficients from
//! the highest degree down, exactly like the shift-register encoder the
//! generated circuit implements, which emits parity highest degree first.

use crate::gf::{gf_add, FieldContext, FieldElement};
use thiserror::Error;

/// Errors from parameter validation and encoding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsError {
    /// Code parameters are unusable for the chosen field.
    #[error("invalid RS parameters n={n}, k={k} over GF(2^{a}): {reason}")]
    InvalidParams {
        n: usize,
        k: usize,
        a: u32,
        reason: &'static str,
    },
    /// A message or codeword slice had the wrong word count.
    #[error("{what} must contain {expected} words, got {got}")]
    ArityMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Parameters of one RS(n, k) code: the field, the lengths, and the expanded
/// generator polynomial.
#[derive(Debug, Clone)]
pub struct RsParams {
    ctx: FieldContext,
    n: usize,
    k: usize,
    gen: Vec<FieldElement>,
}

/// Expands the generator polynomial g(x) = Π_{i=1..num_parity} (x + α^i)
/// into coefficients, lowest degree first; the leading coefficient is 1.
pub fn generator_poly(ctx: &FieldContext, num_parity: usize) -> Result<Vec<FieldElement>, RsError> {
    if num_parity == 0 || num_parity > ctx.order() - 1 {
        return Err(RsError::InvalidParams {
            n: num_parity + 1,
            k: 1,
            a: ctx.width(),
            reason: "parity word count must be in 1..=2^a-2",
        });
    }
    let mut g: Vec<FieldElement> = vec![1];
    for i in 1..=num_parity {
        let root = ctx.exp(i);
        let mut next = vec![0; g.len() + 1];
        for (d, &coeff) in g.iter().enumerate() {
            next[d + 1] = gf_add(next[d + 1], coeff); // x · coeff
            next[d] = gf_add(next[d], ctx.mul(root, coeff)); // α^i · coeff
        }
        g = next;
    }
    Ok(g)
}

impl RsParams {
    /// Validates the code shape and expands the generator polynomial.
    pub fn new(ctx: FieldContext, n: usize, k: usize) -> Result<Self, RsError> {
        let a = ctx.width();
        if k == 0 || k >= n {
            return Err(RsError::InvalidParams {
                n,
                k,
                a,
                reason: "message length must satisfy 0 < k < n",
            });
        }
        if n > ctx.order() {
            return Err(RsError::InvalidParams {
                n,
                k,
                a,
                reason: "codeword length must not exceed 2^a - 1",
            });
        }
        let gen = generator_poly(&ctx, n - k)?;
        Ok(RsParams { ctx, n, k, gen })
    }

    /// The paper-scale code: RS(12, 8) over GF(2^4).
    pub fn rs12_8() -> Self {
        RsParams::new(FieldContext::gf16(), 12, 8).expect("RS(12,8) over GF(2^4) is valid")
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_parity(&self) -> usize {
        self.n - self.k
    }

    /// Generator coefficients g₀ … g₍n−k₎, lowest degree first, monic.
    pub fn generator(&self) -> &[FieldElement] {
        &self.gen
    }

    /// Encodes a k-word message (m₀ first) into its n−k parity words
    /// (p₀ first).
    ///
    /// This runs the classic linear-feedback shift register for division by
    /// g(x): coefficients enter from m₍k₋₁₎ down to m₀, and afterwards
    /// register i holds the degree-i remainder coefficient pᵢ.
    pub fn rs_encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>, RsError> {
        if message.len() != self.k {
            return Err(RsError::ArityMismatch {
                what: "message",
                expected: self.k,
                got: message.len(),
            });
        }
        let np = self.num_parity();
        let mut reg: Vec<FieldElement> = vec![0; np];
        for &m in message.iter().rev() {
            let feedback = gf_add(m, reg[np - 1]);
            for i in (1..np).rev() {
                reg[i] = gf_add(reg[i - 1], self.ctx.mul(feedback, self.gen[i]));
            }
            reg[0] = self.ctx.mul(feedback, self.gen[0]);
        }
        Ok(reg)
    }

    /// Syndromes s₁ … s₍n−k₎ of a codeword laid out as message ++ parity:
    /// word i < k has degree (n−k)+i and word k+j has degree j, matching
    /// [`RsParams::rs_encode`]. A valid systematic codeword yields all zeros.
    pub fn syndromes(&self, codeword: &[FieldElement]) -> Result<Vec<FieldElement>, RsError> {
        if codeword.len() != self.n {
            return Err(RsError::ArityMismatch {
                what: "codeword",
                expected: self.n,
                got: codeword.len(),
            });
        }
        let np = self.num_parity();
        let degree_of = |idx: usize| if idx < self.k { np + idx } else { idx - self.k };
        let mut out = Vec::with_capacity(np);
        for i in 1..=np {
            let root = self.ctx.exp(i);
            let mut s = 0;
            for (idx, &word) in codeword.iter().enumerate() {
                s = gf_add(s, self.ctx.mul(word, self.ctx.pow(root, degree_of(idx) as u32)));
            }
            out.push(s);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independent remainder oracle: schoolbook long division of
    /// m(x)·x^(n−k) by g(x), written against the algebra rather than the
    /// shift-register formulation.
    fn division_remainder(p: &RsParams, message: &[FieldElement]) -> Vec<FieldElement> {
        let np = p.num_parity();
        let mut r: Vec<FieldElement> = vec![0; np];
        r.extend_from_slice(message);
        for d in (np..r.len()).rev() {
            let c = r[d];
            if c != 0 {
                for (j, &gc) in p.generator().iter().enumerate() {
                    r[d - np + j] = gf_add(r[d - np + j], p.ctx().mul(c, gc));
                }
            }
        }
        assert!(r[np..].iter().all(|&v| v == 0), "division left a quotient residue");
        r.truncate(np);
        r
    }

    fn words(p: &RsParams, texts: &[&str]) -> Vec<FieldElement> {
        texts.iter().map(|t| p.ctx().parse_word(t).unwrap()).collect()
    }

    fn texts(p: &RsParams, words: &[FieldElement]) -> Vec<String> {
        words.iter().map(|&w| p.ctx().format_word(w)).collect()
    }

    #[test]
    fn generator_polynomial_for_four_parity_words() {
        let p = RsParams::rs12_8();
        let ctx = p.ctx();
        // g(x) = α¹⁰ + α³x + α⁶x² + α¹³x³ + x⁴.
        assert_eq!(
            p.generator(),
            &[ctx.exp(10), ctx.exp(3), ctx.exp(6), ctx.exp(13), 1]
        );
        assert_eq!(p.generator(), &[7, 8, 12, 13, 1]);
    }

    #[test]
    fn generator_polynomial_edge_cases() {
        let ctx = FieldContext::gf16();
        assert_eq!(generator_poly(&ctx, 1).unwrap(), vec![ctx.alpha(), 1]);
        assert!(matches!(
            generator_poly(&ctx, 0),
            Err(RsError::InvalidParams { .. })
        ));
        assert!(matches!(
            generator_poly(&ctx, 15),
            Err(RsError::InvalidParams { .. })
        ));
    }

    #[test]
    fn generator_roots_evaluate_to_zero() {
        let p = RsParams::rs12_8();
        let ctx = p.ctx();
        for i in 1..=4 {
            let x = ctx.exp(i);
            // Horner evaluation, independent of the expansion loop.
            let val = p
                .generator()
                .iter()
                .rev()
                .fold(0, |acc, &c| gf_add(ctx.mul(acc, x), c));
            assert_eq!(val, 0, "g(α^{i}) must vanish");
        }
    }

    #[test]
    fn worked_example_parity() {
        let p = RsParams::rs12_8();
        let message = words(&p, &["0010", "0101", "0011", "0101", "0110", "0100", "0001", "0101"]);
        let parity = p.rs_encode(&message).unwrap();
        assert_eq!(texts(&p, &parity), ["0000", "0010", "0100", "0111"]);
        // The same result as integers: (0, α², α, α¹¹).
        assert_eq!(parity, vec![0, 4, 2, 14]);
    }

    #[test]
    fn reference_message_vectors() {
        let p = RsParams::rs12_8();
        let cases: [(&[&str; 8], [&str; 4]); 4] = [
            (
                &["0100", "1110", "0111", "1111", "0100", "0010", "0001", "1100"],
                ["1000", "0011", "0011", "1101"],
            ),
            (
                &["0001", "0010", "0011", "0100", "0101", "0110", "0111", "1000"],
                ["1010", "1010", "0001", "0001"],
            ),
            (
                &["1000", "1000", "1000", "1000", "1000", "1000", "1000", "1000"],
                ["0101", "0001", "0110", "0010"],
            ),
            (
                &["0010", "0101", "0011", "0101", "0110", "0100", "0001", "0101"],
                ["0000", "0010", "0100", "0111"],
            ),
        ];
        for (message, expected) in cases {
            let parity = p.rs_encode(&words(&p, message)).unwrap();
            assert_eq!(texts(&p, &parity), expected, "message {message:?}");
        }
    }

    #[test]
    fn zero_message_gives_zero_parity() {
        let p = RsParams::rs12_8();
        assert_eq!(p.rs_encode(&[0; 8]).unwrap(), vec![0; 4]);
    }

    #[test]
    fn encode_agrees_with_long_division() {
        let p = RsParams::rs12_8();
        let mut rng = StdRng::seed_from_u64(0x5eed_0001);
        for _ in 0..500 {
            let message: Vec<FieldElement> = (0..8).map(|_| rng.gen_range(0..16)).collect();
            assert_eq!(
                p.rs_encode(&message).unwrap(),
                division_remainder(&p, &message),
                "message {message:?}"
            );
        }
    }

    #[test]
    fn encoding_is_linear() {
        let p = RsParams::rs12_8();
        let mut rng = StdRng::seed_from_u64(0x5eed_0002);
        for _ in 0..200 {
            let m1: Vec<FieldElement> = (0..8).map(|_| rng.gen_range(0..16)).collect();
            let m2: Vec<FieldElement> = (0..8).map(|_| rng.gen_range(0..16)).collect();
            let sum: Vec<FieldElement> = m1.iter().zip(&m2).map(|(&a, &b)| gf_add(a, b)).collect();
            let p1 = p.rs_encode(&m1).unwrap();
            let p2 = p.rs_encode(&m2).unwrap();
            let ps = p.rs_encode(&sum).unwrap();
            let folded: Vec<FieldElement> =
                p1.iter().zip(&p2).map(|(&a, &b)| gf_add(a, b)).collect();
            assert_eq!(ps, folded);
        }
    }

    #[test]
    fn systematic_codewords_have_zero_syndromes() {
        let p = RsParams::rs12_8();
        let mut rng = StdRng::seed_from_u64(0x5eed_0003);
        for _ in 0..100 {
            let message: Vec<FieldElement> = (0..8).map(|_| rng.gen_range(0..16)).collect();
            let mut codeword = message.clone();
            codeword.extend(p.rs_encode(&message).unwrap());
            assert_eq!(p.syndromes(&codeword).unwrap(), vec![0; 4]);
        }
        assert_eq!(p.syndromes(&[0; 12]).unwrap(), vec![0; 4]);
    }

    #[test]
    fn single_word_corruption_is_detected() {
        let p = RsParams::rs12_8();
        let message = words(&p, &["0001", "0010", "0011", "0100", "0101", "0110", "0111", "1000"]);
        let mut codeword = message.clone();
        codeword.extend(p.rs_encode(&message).unwrap());
        for pos in 0..12 {
            for delta in 1..16 {
                let mut corrupted = codeword.clone();
                corrupted[pos] = gf_add(corrupted[pos], delta);
                let s = p.syndromes(&corrupted).unwrap();
                assert!(
                    s.iter().any(|&v| v != 0),
                    "corruption at {pos} by {delta} went undetected"
                );
            }
        }
    }

    #[test]
    fn parameter_validation() {
        let ctx = FieldContext::gf16();
        assert!(RsParams::new(ctx.clone(), 12, 0).is_err());
        assert!(RsParams::new(ctx.clone(), 8, 8).is_err());
        assert!(RsParams::new(ctx.clone(), 16, 8).is_err());
        // A one-parity toy code is legal; n−k needs no particular parity.
        let toy = RsParams::new(ctx.clone(), 2, 1).unwrap();
        assert_eq!(toy.generator(), &[ctx.alpha(), 1]);
        for m in 0..16 {
            // Remainder of m·x mod (x + α) is m·α.
            assert_eq!(toy.rs_encode(&[m]).unwrap(), vec![ctx.mul(m, ctx.alpha())]);
        }
        let p = RsParams::rs12_8();
        assert!(matches!(
            p.rs_encode(&[0; 7]),
            Err(RsError::ArityMismatch { expected: 8, got: 7, .. })
        ));
        assert!(matches!(
            p.syndromes(&[0; 11]),
            Err(RsError::ArityMismatch { expected: 12, got: 11, .. })
        ));
    }
}
