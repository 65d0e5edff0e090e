//! Angle expressions.

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "asin" => Func::Asin,
            "acos" => Func::Acos,
            "atan" => Func::Atan,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Asin => "asin",
            Func::Acos => "acos",
            Func::Atan => "atan",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sqrt => x.sqrt(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Asin => x.asin(),
            Func::Acos => x.acos(),
            Func::Atan => x.atan(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Non-negative literal.
    Num(f64),
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(x: f64) -> Self {
        if x.is_sign_negative() {
            Expr::Neg(Box::new(Expr::Num(-x)))
        } else {
            Expr::Num(x)
        }
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn call(f: Func, arg: Expr) -> Self {
        Expr::Call(f, Box::new(arg))
    }

    /// `pi/4`
    pub fn quarter_pi() -> Self {
        Expr::bin(BinOp::Div, Expr::Pi, Expr::Num(4.0))
    }

    /// `atan(1/sqrt(k))`
    pub fn atan_inv_sqrt(k: u32) -> Self {
        Expr::call(
            Func::Atan,
            Expr::bin(
                BinOp::Div,
                Expr::Num(1.0),
                Expr::call(Func::Sqrt, Expr::Num(f64::from(k))),
            ),
        )
    }

    /// `atan(sqrt(k))`
    pub fn atan_sqrt(k: u32) -> Self {
        Expr::call(Func::Atan, Expr::call(Func::Sqrt, Expr::Num(f64::from(k))))
    }

    /// `acos(sqrt(a/b))`
    pub fn acos_sqrt_ratio(a: u32, b: u32) -> Self {
        Expr::call(
            Func::Acos,
            Expr::call(
                Func::Sqrt,
                Expr::bin(BinOp::Div, Expr::Num(f64::from(a)), Expr::Num(f64::from(b))),
            ),
        )
    }

    pub fn eval(&self) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Pi => PI,
            Expr::Neg(e) => -e.eval(),
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(), r.eval());
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                }
            }
            Expr::Call(f, e) => f.apply(e.eval()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(x) if x.is_sign_negative() => write!(f, "(-{})", -x)?,
            Expr::Num(x) => write!(f, "{x}")?,
            Expr::Pi => f.write_str("pi")?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_prec(f, 3)?;
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                l.fmt_prec(f, p)?;
                write!(f, "{}", op.symbol())?;
                // left-associative: an equal-precedence right operand needs parentheses
                r.fmt_prec(f, p + 1)?;
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.fmt_prec(f, 0)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_keeps_structure() {
        let e = Expr::bin(
            BinOp::Sub,
            Expr::Num(1.0),
            Expr::bin(BinOp::Sub, Expr::Num(2.0), Expr::Num(3.0)),
        );
        assert_eq!(e.to_string(), "1-(2-3)");
        assert_eq!(e.eval(), 2.0);
        assert_eq!(Expr::atan_inv_sqrt(2).to_string(), "atan(1/sqrt(2))");
        assert_eq!(Expr::acos_sqrt_ratio(1, 3).to_string(), "acos(sqrt(1/3))");
        assert_eq!(Expr::num(-0.5).to_string(), "-0.5");
        let neg_sum = Expr::Neg(Box::new(Expr::bin(BinOp::Add, Expr::Pi, Expr::Num(1.0))));
        assert_eq!(neg_sum.to_string(), "-(pi+1)");
    }

    #[test]
    fn evaluates_presets_exactly() {
        assert_eq!(Expr::quarter_pi().eval(), std::f64::consts::FRAC_PI_4);
        assert_eq!(Expr::atan_inv_sqrt(3).eval(), (1.0 / 3f64.sqrt()).atan());
    }
}
