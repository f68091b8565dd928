//! Arithmetic over the binary extension fields GF(2^a).
//!
//! A field element is stored as a bit mask over the polynomial basis
//! {1, α, α², …}: bit `j` of the integer holds the coefficient of α^j.
//! Addition is bitwise XOR; multiplication goes through exp/log tables built
//! from a primitive polynomial, with exponents reduced modulo 2^a − 1.
//!
//! Text rendering follows the hardware-table convention of printing the α^0
//! coefficient first, so element 1 in GF(2^4) renders as `"1000"` and
//! α + α² renders as `"0110"`.

use thiserror::Error;

/// A field element: an `a`-bit value with bit `j` holding the coefficient of
/// α^j. Validity (`value < 2^a`) is relative to the [`FieldContext`] it is
/// used with; context operations panic on out-of-range elements.
pub type FieldElement = u16;

/// Errors from field construction and word parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    /// The requested bit width is outside the supported 2..=8 range.
    #[error("field width {a} is outside the supported range 2..=8")]
    InvalidWidth { a: u32 },
    /// The modulus polynomial does not have degree `a` and constant term 1.
    #[error("polynomial {poly:#07b} must have degree {a} and constant term 1")]
    InvalidPolynomial { poly: u32, a: u32 },
    /// The modulus polynomial is irreducible-looking but α does not generate
    /// the whole multiplicative group (or the polynomial is reducible, which
    /// shortens the cycle the same way).
    #[error("polynomial {poly:#07b} is not primitive: alpha has order {order}, expected {expected}")]
    NotPrimitive {
        poly: u32,
        order: usize,
        expected: usize,
    },
    /// Division by the zero element.
    #[error("division by zero in GF(2^{a})")]
    DivisionByZero { a: u32 },
    /// A textual word did not parse as an `a`-bit binary string.
    #[error("cannot parse {text:?} as a {a}-bit binary word")]
    BadWord { text: String, a: u32 },
}

/// A concrete GF(2^a) field: the bit width, the primitive polynomial, and the
/// exp/log tables driving multiplication. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FieldContext {
    a: u32,
    primitive_poly: u32,
    exp: Vec<FieldElement>,
    log: Vec<u16>,
}

impl FieldContext {
    /// Builds a field from its bit width and primitive polynomial.
    ///
    /// `primitive_poly` is an (a+1)-bit mask with bit `j` holding the
    /// coefficient of x^j, so 1 + x + x⁴ is `0b1_0011`. The exp table is
    /// built by repeated multiplication by α with reduction by the
    /// polynomial; if α cycles back to 1 in fewer than 2^a − 1 steps the
    /// polynomial is not primitive and construction fails.
    pub fn new(a: u32, primitive_poly: u32) -> Result<Self, GfError> {
        if !(2..=8).contains(&a) {
            return Err(GfError::InvalidWidth { a });
        }
        let degree_ok = primitive_poly >> a == 1;
        let constant_ok = primitive_poly & 1 == 1;
        if !degree_ok || !constant_ok {
            return Err(GfError::InvalidPolynomial {
                poly: primitive_poly,
                a,
            });
        }

        let order = (1usize << a) - 1;
        let mut exp = Vec::with_capacity(order);
        let mut v: u32 = 1;
        for i in 0..order {
            if v == 1 && i > 0 {
                // α returned to 1 early: its cycle misses part of the group.
                return Err(GfError::NotPrimitive {
                    poly: primitive_poly,
                    order: i,
                    expected: order,
                });
            }
            exp.push(v as FieldElement);
            v <<= 1;
            if v >> a == 1 {
                v ^= primitive_poly;
            }
        }
        if v != 1 {
            // The multiply-by-α map is a permutation of the α orbit, so after
            // `order` steps anything other than 1 means the orbit is shorter
            // than the full group and wrapped somewhere past index 0.
            return Err(GfError::NotPrimitive {
                poly: primitive_poly,
                order: exp.iter().skip(1).position(|&e| e == 1).map_or(order, |i| i + 1),
                expected: order,
            });
        }

        let mut log = vec![0u16; 1 << a];
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u16;
        }
        Ok(FieldContext {
            a,
            primitive_poly,
            exp,
            log,
        })
    }

    /// The 16-element field GF(2^4) with modulus 1 + x + x⁴, used by all the
    /// built-in circuits and the RS(12,8) encoder.
    pub fn gf16() -> Self {
        FieldContext::new(4, 0b1_0011).expect("1 + x + x^4 is primitive")
    }

    /// Bit width `a` of the field.
    pub fn width(&self) -> u32 {
        self.a
    }

    /// The primitive polynomial mask this field was built from.
    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Order of the multiplicative group, 2^a − 1.
    pub fn order(&self) -> usize {
        self.exp.len()
    }

    /// The primitive element α.
    pub fn alpha(&self) -> FieldElement {
        self.exp[1]
    }

    /// α^i, with the exponent reduced modulo 2^a − 1.
    pub fn exp(&self, i: usize) -> FieldElement {
        self.exp[i % self.order()]
    }

    /// Discrete logarithm of a nonzero element: `log(exp(i)) == i`.
    pub fn log(&self, x: FieldElement) -> Option<usize> {
        self.check(x);
        if x == 0 {
            None
        } else {
            Some(self.log[x as usize] as usize)
        }
    }

    fn check(&self, x: FieldElement) {
        assert!(
            (x as usize) < (1 << self.a),
            "element {x} is out of range for GF(2^{})",
            self.a
        );
    }

    /// Field multiplication via exponent addition; zero absorbs.
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.check(x);
        self.check(y);
        if x == 0 || y == 0 {
            return 0;
        }
        let i = self.log[x as usize] as usize + self.log[y as usize] as usize;
        self.exp[i % self.order()]
    }

    /// Field division; `y` must be nonzero.
    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement, GfError> {
        self.check(x);
        self.check(y);
        if y == 0 {
            return Err(GfError::DivisionByZero { a: self.a });
        }
        if x == 0 {
            return Ok(0);
        }
        let order = self.order();
        let i = self.log[x as usize] as usize + order - self.log[y as usize] as usize;
        Ok(self.exp[i % order])
    }

    /// x^n with exponents reduced modulo 2^a − 1. By convention `pow(0, 0)`
    /// is 1 and `pow(0, n)` is 0 for positive `n`.
    pub fn pow(&self, x: FieldElement, n: u32) -> FieldElement {
        self.check(x);
        if n == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let i = self.log[x as usize] as usize * n as usize;
        self.exp[i % self.order()]
    }

    /// The a×a binary matrix of multiplication by the constant `c`, as column
    /// masks: entry `j` is the element `c · α^j`, whose bits form column `j`.
    /// Multiplying by `c` is linear over GF(2), so for any x,
    /// [`apply_matrix`]`(&m, x) == mul(c, x)`.
    pub fn mul_matrix(&self, c: FieldElement) -> Vec<FieldElement> {
        (0..self.a)
            .map(|j| self.mul(c, 1 << j))
            .collect()
    }

    /// The representation table of the whole field: one
    /// (power, polynomial, binary) row for zero, then one for each of
    /// α^0 … α^(2^a − 2).
    pub fn table_rows(&self) -> Vec<(String, String, String)> {
        let mut rows = Vec::with_capacity(1 + self.order());
        rows.push(("0".to_string(), "0".to_string(), self.format_word(0)));
        for i in 0..self.order() {
            let e = self.exp[i];
            rows.push((power_text(i), poly_text(e), self.format_word(e)));
        }
        rows
    }

    /// Renders an element as an `a`-character binary string, α^0 coefficient
    /// first (element 1 in GF(2^4) is `"1000"`).
    pub fn format_word(&self, x: FieldElement) -> String {
        self.check(x);
        (0..self.a)
            .map(|j| if (x >> j) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Parses an `a`-character binary string written α^0 coefficient first.
    pub fn parse_word(&self, text: &str) -> Result<FieldElement, GfError> {
        let bad = || GfError::BadWord {
            text: text.to_string(),
            a: self.a,
        };
        if text.len() != self.a as usize {
            return Err(bad());
        }
        let mut x: FieldElement = 0;
        for (j, ch) in text.chars().enumerate() {
            match ch {
                '1' => x |= 1 << j,
                '0' => {}
                _ => return Err(bad()),
            }
        }
        Ok(x)
    }
}

/// Field addition: bitwise XOR, context-free.
pub fn gf_add(x: FieldElement, y: FieldElement) -> FieldElement {
    x ^ y
}

/// Applies a binary matrix in column-mask form ([`FieldContext::mul_matrix`])
/// to an element: XOR of the columns selected by the set bits of `x`.
pub fn apply_matrix(matrix: &[FieldElement], x: FieldElement) -> FieldElement {
    matrix
        .iter()
        .enumerate()
        .filter(|&(j, _)| (x >> j) & 1 == 1)
        .fold(0, |acc, (_, &col)| acc ^ col)
}

/// Power-representation text: "1" for α^0, "α" for α^1, "α^i" beyond.
fn power_text(i: usize) -> String {
    match i {
        0 => "1".to_string(),
        1 => "α".to_string(),
        _ => format!("α^{i}"),
    }
}

/// Polynomial-representation text, lowest term first: "1+α+α^2" style.
fn poly_text(e: FieldElement) -> String {
    if e == 0 {
        return "0".to_string();
    }
    let terms: Vec<String> = (0..16)
        .filter(|j| (e >> j) & 1 == 1)
        .map(|j| power_text(j))
        .collect();
    terms.join("+")
}
