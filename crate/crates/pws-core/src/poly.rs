//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;

pub type Rational = BigRational;

/// Shared, ordered list of variable names.
pub type VarList = Arc<[String]>;

pub fn var_list<S: AsRef<str>>(names: &[S]) -> VarList {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let s = s.trim();
    let bad = || PolyError::BadRational(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to a scaled quotient.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Best rational approximation with a bounded denominator is not needed here;
/// this converts the exact binary value of `x`.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: VarList,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &VarList) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &VarList, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &VarList) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn var(vars: &VarList, i: usize) -> Self {
        assert!(i < vars.len(), "variable index {i} out of range");
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    /// The variable with the given name; panics if absent.
    pub fn named(vars: &VarList, name: &str) -> Self {
        let i = vars
            .iter()
            .position(|v| v == name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        Self::var(vars, i)
    }

    pub fn monomial(vars: &VarList, exps: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exps.len(), vars.len());
        let mut p = Self::zero(vars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms<I>(vars: &VarList, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len());
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn vars(&self) -> &VarList {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars()])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.degree_in(i) > 0).collect()
    }

    fn check_vars(&self, other: &MultiPoly) {
        assert!(
            self.vars == other.vars,
            "variable lists differ: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Replaces every variable by the matching image; all images share `target`.
    pub fn substitute(&self, images: &[MultiPoly], target: &VarList) -> Self {
        assert_eq!(images.len(), self.nvars(), "one image per variable");
        for im in images {
            assert!(im.vars == *target, "image variables must equal the target list");
        }
        let mut cache: Vec<Vec<MultiPoly>> = images.iter().map(|im| vec![Self::one(target), im.clone()]).collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut t = Self::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap() * &images[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Replaces variable `i` by `image` (same variable list).
    pub fn substitute_var(&self, i: usize, image: &MultiPoly) -> Self {
        self.check_vars(image);
        let images: Vec<MultiPoly> = (0..self.nvars())
            .map(|j| if j == i { image.clone() } else { Self::var(&self.vars, j) })
            .collect();
        self.substitute(&images, &self.vars)
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c * int(e[i] as i64));
        }
        out
    }

    /// Antiderivative in variable `i` with zero constant of integration.
    pub fn antiderivative(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[i] += 1;
            let k = int(f[i] as i64);
            out.add_term(f, c / k);
        }
        out
    }

    /// Definite integral over `x_i ∈ [lo, hi]` where the bounds do not involve `x_i`.
    pub fn integrate(&self, i: usize, lo: &MultiPoly, hi: &MultiPoly) -> Result<Self, PolyError> {
        self.check_vars(lo);
        self.check_vars(hi);
        if lo.degree_in(i) > 0 || hi.degree_in(i) > 0 {
            return Err(PolyError::BoundDependsOnVariable(self.vars[i].clone()));
        }
        let f = self.antiderivative(i);
        Ok(&f.substitute_var(i, hi) - &f.substitute_var(i, lo))
    }

    /// Drops all terms of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-expresses the polynomial over a list containing all its variable names.
    pub fn with_vars(&self, target: &VarList) -> Result<Self, PolyError> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, v) in self.vars.iter().enumerate() {
            match target.iter().position(|t| t == v) {
                Some(j) => map.push(j),
                None if self.degree_in(i) == 0 => map.push(usize::MAX),
                None => return Err(PolyError::UnknownVariable(v.clone())),
            }
        }
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut f = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    f[map[i]] = k;
                }
            }
            out.add_term(f, c.clone());
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars());
        let mut s = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars());
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = rational_to_f64(c);
                for (xi, &k) in x.iter().zip(e) {
                    if k > 0 {
                        t *= xi.powi(k as i32);
                    }
                }
                t
            })
            .sum()
    }

    pub fn to_f64(&self) -> PolyF64 {
        PolyF64::new(self)
    }

    /// Parses an expression such as `"-3*(x+l)^2 + 2*(x+l) + 7/4"` over `vars`.
    pub fn parse(src: &str, vars: &VarList) -> Result<Self, PolyError> {
        parse::Parser::new(src, vars)?.parse()
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.vars.join(","), self)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first reads more naturally.
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (n, (e, c)) in ts.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&a), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Floating-point view of a polynomial for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct PolyF64 {
    nvars: usize,
    max_exp: Vec<u32>,
    terms: Vec<(f64, Vec<u32>)>,
}

impl PolyF64 {
    pub fn new(p: &MultiPoly) -> Self {
        let nvars = p.nvars();
        let max_exp = (0..nvars).map(|i| p.degree_in(i)).collect();
        let terms = p.terms().map(|(e, c)| (rational_to_f64(c), e.clone())).collect();
        PolyF64 { nvars, max_exp, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(f64, Vec<u32>)] {
        &self.terms
    }

    pub fn max_exp(&self) -> &[u32] {
        &self.max_exp
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut s = 0.0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                match k {
                    0 => {}
                    1 => t *= xi,
                    2 => t *= xi * xi,
                    _ => t *= xi.powi(k as i32),
                }
            }
            s += t;
        }
        s
    }
}

mod parse {
    use super::*;

    #[derive(Clone, Debug, PartialEq)]
    enum Tok {
        Num(Rational),
        Ident(String),
        Op(char),
    }

    pub(super) struct Parser<'v> {
        toks: Vec<Tok>,
        pos: usize,
        vars: &'v VarList,
        src: String,
    }

    impl<'v> Parser<'v> {
        pub(super) fn new(src: &str, vars: &'v VarList) -> Result<Self, PolyError> {
            let mut toks = Vec::new();
            let cs: Vec<char> = src.chars().collect();
            let mut i = 0;
            while i < cs.len() {
                let c = cs[i];
                if c.is_whitespace() {
                    i += 1;
                } else if c.is_ascii_digit() || c == '.' {
                    let st = i;
                    while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                        i += 1;
                    }
                    let s: String = cs[st..i].iter().collect();
                    toks.push(Tok::Num(parse_rational(&s)?));
                } else if c.is_alphabetic() || c == '_' {
                    let st = i;
                    while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                        i += 1;
                    }
                    toks.push(Tok::Ident(cs[st..i].iter().collect()));
                } else if "+-*/^()".contains(c) {
                    toks.push(Tok::Op(c));
                    i += 1;
                } else {
                    return Err(PolyError::Parse(format!("unexpected character '{c}' in '{src}'")));
                }
            }
            Ok(Parser { toks, pos: 0, vars, src: src.to_string() })
        }

        fn err(&self, msg: &str) -> PolyError {
            PolyError::Parse(format!("{msg} at token {} in '{}'", self.pos, self.src))
        }

        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos)
        }

        fn eat(&mut self, op: char) -> bool {
            if self.peek() == Some(&Tok::Op(op)) {
                self.pos += 1;
                true
            } else {
                false
            }
        }

        pub(super) fn parse(mut self) -> Result<MultiPoly, PolyError> {
            let p = self.expr()?;
            if self.pos != self.toks.len() {
                return Err(self.err("trailing input"));
            }
            Ok(p)
        }

        fn expr(&mut self) -> Result<MultiPoly, PolyError> {
            let mut acc = self.term()?;
            loop {
                if self.eat('+') {
                    acc = &acc + &self.term()?;
                } else if self.eat('-') {
                    acc = &acc - &self.term()?;
                } else {
                    return Ok(acc);
                }
            }
        }

        fn term(&mut self) -> Result<MultiPoly, PolyError> {
            let mut acc = self.unary()?;
            loop {
                if self.eat('*') {
                    acc = &acc * &self.unary()?;
                } else if self.eat('/') {
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(self.err("division only by nonzero constants"));
                    }
                    acc = acc.scale(&(Rational::one() / d.constant_term()));
                } else {
                    return Ok(acc);
                }
            }
        }

        fn unary(&mut self) -> Result<MultiPoly, PolyError> {
            if self.eat('-') {
                return Ok(-self.unary()?);
            }
            if self.eat('+') {
                return self.unary();
            }
            self.power()
        }

        fn power(&mut self) -> Result<MultiPoly, PolyError> {
            let base = self.atom()?;
            if self.eat('^') {
                match self.peek().cloned() {
                    Some(Tok::Num(n)) if n.is_integer() && !n.is_negative() => {
                        self.pos += 1;
                        let k = n.to_integer().to_u32().ok_or_else(|| self.err("exponent too large"))?;
                        return Ok(base.pow(k));
                    }
                    _ => return Err(self.err("expected a nonnegative integer exponent")),
                }
            }
            Ok(base)
        }

        fn atom(&mut self) -> Result<MultiPoly, PolyError> {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    Ok(MultiPoly::constant(self.vars, n))
                }
                Some(Tok::Ident(name)) => {
                    self.pos += 1;
                    match self.vars.iter().position(|v| *v == name) {
                        Some(i) => Ok(MultiPoly::var(self.vars, i)),
                        None => Err(PolyError::UnknownVariable(name)),
                    }
                }
                Some(Tok::Op('(')) => {
                    self.pos += 1;
                    let p = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.err("expected ')'"));
                    }
                    Ok(p)
                }
                _ => Err(self.err("expected a number, variable or '('")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> VarList {
        var_list(&["x", "y"])
    }

    #[test]
    fn parse_and_display_round_trip() {
        let v = xy();
        let p = MultiPoly::parse("1/2*(3 - x) + x*y^2 - 0.25", &v).unwrap();
        let q = MultiPoly::parse(&p.to_string(), &v).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.coeff(&[0, 0]), rat(5, 4));
        assert_eq!(p.coeff(&[1, 0]), rat(-1, 2));
        assert_eq!(p.coeff(&[1, 2]), int(1));
    }

    #[test]
    fn zero_coefficients_are_not_stored() {
        let v = xy();
        let p = MultiPoly::parse("x - x + y", &v).unwrap();
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn substitution_composes() {
        let v = xy();
        let p = MultiPoly::parse("x^2 + y", &v).unwrap();
        let imgs = vec![MultiPoly::parse("x + y", &v).unwrap(), MultiPoly::parse("x - y", &v).unwrap()];
        let q = p.substitute(&imgs, &v);
        assert_eq!(q, MultiPoly::parse("x^2 + 2*x*y + y^2 + x - y", &v).unwrap());
    }

    #[test]
    fn definite_integral_with_polynomial_bound() {
        let v = var_list(&["t", "y"]);
        let p = MultiPoly::parse("t", &v).unwrap();
        let lo = MultiPoly::constant(&v, int(-1));
        let hi = MultiPoly::named(&v, "y");
        let q = p.integrate(0, &lo, &hi).unwrap();
        assert_eq!(q, MultiPoly::parse("y^2/2 - 1/2", &v).unwrap());
        assert!(p.integrate(0, &lo, &MultiPoly::named(&v, "t")).is_err());
    }

    #[test]
    fn decimal_and_fraction_parsing() {
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("7/4").unwrap(), rat(7, 4));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a").is_err());
    }

    #[test]
    fn f64_view_matches_exact() {
        let v = xy();
        let p = MultiPoly::parse("-3*x^2*y + 9/2*x*y - 5/2*x + 15/8", &v).unwrap();
        let pf = p.to_f64();
        let x = [0.3, -0.7];
        let exact = p.eval(&[rational_from_f64(0.3).unwrap(), rational_from_f64(-0.7).unwrap()]);
        assert!((pf.eval(&x) - rational_to_f64(&exact)).abs() < 1e-14);
        assert!((p.eval_f64(&x) - pf.eval(&x)).abs() < 1e-14);
    }

    #[test]
    fn with_vars_embeds_by_name() {
        let v = xy();
        let w = var_list(&["y", "eps", "x"]);
        let p = MultiPoly::parse("x*y^2 + 1", &v).unwrap();
        let q = p.with_vars(&w).unwrap();
        assert_eq!(q.coeff(&[2, 0, 1]), int(1));
        let r = MultiPoly::parse("x + eps", &w).unwrap();
        assert!(r.with_vars(&v).is_err());
    }

    #[test]
    fn power_by_squaring() {
        let v = xy();
        let p = MultiPoly::parse("x + 1", &v).unwrap();
        assert_eq!(p.pow(3), MultiPoly::parse("x^3 + 3*x^2 + 3*x + 1", &v).unwrap());
        assert_eq!(p.pow(0), MultiPoly::one(&v));
    }
}
