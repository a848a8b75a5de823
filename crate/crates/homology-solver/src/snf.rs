use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Dense integer matrix, row-major, arbitrary precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Elementary operation recorded during elimination.
#[derive(Clone, Debug)]
pub enum Op<T> {
    RowSwap(usize, usize),
    ColSwap(usize, usize),
    /// row dst += k · row src
    RowAdd { dst: usize, src: usize, k: T },
    /// col dst += k · col src
    ColAdd { dst: usize, src: usize, k: T },
    RowNeg(usize),
}

/// Entry arithmetic; `None` signals overflow.
trait Ent: Clone + PartialEq + fmt::Debug {
    fn nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn negated(&self) -> Self;
    fn cmp_abs(&self, o: &Self) -> Ordering;
    fn div_floor(&self, o: &Self) -> Self;
    fn divides(&self, o: &Self) -> bool;
    /// self + k·b
    fn add_mul(&self, k: &Self, b: &Self) -> Option<Self>;
    fn big(&self) -> BigInt;
}

impl Ent for i128 {
    fn nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn negated(&self) -> Self {
        -*self
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.unsigned_abs().cmp(&o.unsigned_abs())
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn divides(&self, o: &Self) -> bool {
        *o % *self == 0
    }
    fn add_mul(&self, k: &Self, b: &Self) -> Option<Self> {
        let p = k.checked_mul(*b)?;
        let s = self.checked_add(p)?;
        // keep a margin so negation and later products stay representable
        if s.unsigned_abs() > (1u128 << 100) {
            return None;
        }
        Some(s)
    }
    fn big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Ent for BigInt {
    fn nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn negated(&self) -> Self {
        -self
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.magnitude().cmp(o.magnitude())
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn divides(&self, o: &Self) -> bool {
        Zero::is_zero(&(o % self))
    }
    fn add_mul(&self, k: &Self, b: &Self) -> Option<Self> {
        Some(self + k * b)
    }
    fn big(&self) -> BigInt {
        self.clone()
    }
}

struct Overflow;

struct Elim<T> {
    diag: Vec<T>,
    log: Vec<Op<T>>,
}

fn eliminate<T: Ent>(rows: usize, cols: usize, mut a: Vec<Vec<T>>) -> Result<Elim<T>, Overflow> {
    let mut log = Vec::new();
    let mut diag = Vec::new();
    let n = rows.min(cols);
    for t in 0..n {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.nil() && best.is_none_or(|(bi, bj)| x.cmp_abs(&a[bi][bj]) == Ordering::Less) {
                    best = Some((i, j));
                    if x.is_unit() {
                        break;
                    }
                }
            }
            if best.is_some_and(|(bi, bj)| a[bi][bj].is_unit()) {
                break;
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_in(&mut a, &mut log, t, pi, pj);
        loop {
            let mut clean = true;
            // clear column t below the pivot
            for i in t + 1..rows {
                if a[i][t].nil() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]).negated();
                let (head, tail) = a.split_at_mut(i);
                let (prow, row) = (&head[t], &mut tail[0]);
                for j in t..cols {
                    if !prow[j].nil() {
                        row[j] = row[j].add_mul(&q, &prow[j]).ok_or(Overflow)?;
                    }
                }
                log.push(Op::RowAdd { dst: i, src: t, k: q });
                if !a[i][t].nil() {
                    clean = false;
                }
            }
            // clear row t right of the pivot; column t is zero off the pivot here
            // only when the column pass was clean
            if clean {
                for j in t + 1..cols {
                    if a[t][j].nil() {
                        continue;
                    }
                    let q = a[t][j].div_floor(&a[t][t]).negated();
                    let v = a[t][j].add_mul(&q, &a[t][t]).ok_or(Overflow)?;
                    a[t][j] = v;
                    log.push(Op::ColAdd { dst: j, src: t, k: q });
                    if !a[t][j].nil() {
                        clean = false;
                    }
                }
            }
            if !clean {
                let mut best = (t, t);
                for i in t..rows {
                    if !a[i][t].nil() && a[i][t].cmp_abs(&a[best.0][best.1]) == Ordering::Less {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !a[t][j].nil() && a[t][j].cmp_abs(&a[best.0][best.1]) == Ordering::Less {
                        best = (t, j);
                    }
                }
                swap_in(&mut a, &mut log, t, best.0, best.1);
                continue;
            }
            if !a[t][t].is_unit() {
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[t][t].divides(&a[i][j])));
                if let Some(i) = bad {
                    let one = one_of(&a[t][t]);
                    for j in t..cols {
                        if !a[i][j].nil() {
                            a[t][j] = a[t][j].add_mul(&one, &a[i][j]).ok_or(Overflow)?;
                        }
                    }
                    log.push(Op::RowAdd { dst: t, src: i, k: one });
                    continue;
                }
            }
            break;
        }
        if a[t][t].is_neg() {
            a[t][t] = a[t][t].negated();
            log.push(Op::RowNeg(t));
        }
        diag.push(a[t][t].clone());
    }
    Ok(Elim { diag, log })
}

fn one_of<T: Ent>(x: &T) -> T {
    // |x| / |x| without needing a One bound on the trait
    let a = if x.is_neg() { x.negated() } else { x.clone() };
    a.div_floor(&a)
}

fn swap_in<T: Ent>(a: &mut [Vec<T>], log: &mut Vec<Op<T>>, t: usize, i: usize, j: usize) {
    if i != t {
        a.swap(i, t);
        log.push(Op::RowSwap(i, t));
    }
    if j != t {
        for row in a.iter_mut() {
            row.swap(j, t);
        }
        log.push(Op::ColSwap(j, t));
    }
}

/// Smith form of a matrix as diagonal plus the operation log that produced it.
#[derive(Clone, Debug)]
pub struct Snf {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero diagonal entries d₁ | d₂ | … (all positive).
    pub diag: Vec<BigInt>,
    log: Vec<Op<BigInt>>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Invariant factors other than 1.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn s_matrix(&self) -> IntMatrix {
        let mut s = IntMatrix::zeros(self.rows, self.cols);
        for (i, d) in self.diag.iter().enumerate() {
            s.set(i, i, d.clone());
        }
        s
    }

    /// U with U·A·V = S.
    pub fn u_matrix(&self) -> IntMatrix {
        let mut u = IntMatrix::identity(self.rows);
        for op in &self.log {
            match op {
                Op::RowSwap(i, j) => {
                    for c in 0..u.cols {
                        u.entries.swap(i * u.cols + c, j * u.cols + c);
                    }
                }
                Op::RowAdd { dst, src, k } => {
                    for c in 0..u.cols {
                        let v = u.get(*dst, c) + k * u.get(*src, c);
                        u.set(*dst, c, v);
                    }
                }
                Op::RowNeg(i) => {
                    for c in 0..u.cols {
                        let v = -u.get(*i, c);
                        u.set(*i, c, v);
                    }
                }
                _ => {}
            }
        }
        u
    }

    /// V with U·A·V = S.
    pub fn v_matrix(&self) -> IntMatrix {
        let mut v = IntMatrix::identity(self.cols);
        for op in &self.log {
            match op {
                Op::ColSwap(i, j) => {
                    for r in 0..v.rows {
                        v.entries.swap(r * v.cols + i, r * v.cols + j);
                    }
                }
                Op::ColAdd { dst, src, k } => {
                    for r in 0..v.rows {
                        let x = v.get(r, *dst) + k * v.get(r, *src);
                        v.set(r, *dst, x);
                    }
                }
                _ => {}
            }
        }
        v
    }

    /// Some x with A·x = c, if one exists over ℤ.
    pub fn solve(&self, c: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(c.len(), self.rows, "right-hand side has the wrong length");
        let mut c = c.to_vec();
        for op in &self.log {
            match op {
                Op::RowSwap(i, j) => c.swap(*i, *j),
                Op::RowAdd { dst, src, k } => {
                    let v = &c[*dst] + k * &c[*src];
                    c[*dst] = v;
                }
                Op::RowNeg(i) => c[*i] = -&c[*i],
                _ => {}
            }
        }
        let r = self.rank();
        if c[r..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut y = vec![BigInt::zero(); self.cols];
        for i in 0..r {
            let (q, rem) = c[i].div_rem(&self.diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        }
        for op in self.log.iter().rev() {
            match op {
                Op::ColSwap(i, j) => y.swap(*i, *j),
                Op::ColAdd { dst, src, k } => {
                    let v = &y[*src] + k * &y[*dst];
                    y[*src] = v;
                }
                _ => {}
            }
        }
        Some(y)
    }
}


fn big_log(log: Vec<Op<i128>>) -> Vec<Op<BigInt>> {
    log.into_iter()
        .map(|op| match op {
            Op::RowSwap(i, j) => Op::RowSwap(i, j),
            Op::ColSwap(i, j) => Op::ColSwap(i, j),
            Op::RowAdd { dst, src, k } => Op::RowAdd { dst, src, k: k.big() },
            Op::ColAdd { dst, src, k } => Op::ColAdd { dst, src, k: k.big() },
            Op::RowNeg(i) => Op::RowNeg(i),
        })
        .collect()
}

/// Smith normal form with smallest-magnitude pivoting. Runs on i128 and
/// restarts on big integers if an entry grows too large.
pub fn smith(a: &IntMatrix) -> Snf {
    let small: Option<Vec<Vec<i64>>> = (0..a.rows).map(|i| (0..a.cols).map(|j| a.get(i, j).to_i64()).collect()).collect();
    match small {
        Some(rows) => smith_i64(a.rows, a.cols, rows),
        None => {
            let big: Vec<Vec<BigInt>> = (0..a.rows).map(|i| (0..a.cols).map(|j| a.get(i, j).clone()).collect()).collect();
            smith_big(a.rows, a.cols, big)
        }
    }
}

/// Same as [`smith`] for a matrix given as machine-integer rows.
pub fn smith_i64(rows: usize, cols: usize, a: Vec<Vec<i64>>) -> Snf {
    let small: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    match eliminate(rows, cols, small) {
        Ok(e) => Snf { rows, cols, diag: e.diag.iter().map(Ent::big).collect(), log: big_log(e.log) },
        Err(Overflow) => smith_big(rows, cols, a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()),
    }
}

fn smith_big(rows: usize, cols: usize, a: Vec<Vec<BigInt>>) -> Snf {
    let e = eliminate(rows, cols, a).unwrap_or_else(|_| unreachable!("big integers do not overflow"));
    Snf { rows, cols, diag: e.diag, log: e.log }
}

/// (S, U, V) with U·A·V = S.
pub fn smith_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let s = smith(a);
    (s.s_matrix(), s.u_matrix(), s.v_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_two_three() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn zero_matrix() {
        let a = IntMatrix::zeros(3, 4);
        let (s, u, v) = smith_normal_form(&a);
        assert!(s.is_zero());
        assert_eq!(u, IntMatrix::identity(3));
        assert_eq!(v, IntMatrix::identity(4));
    }

    #[test]
    fn solve_simple() {
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let s = smith(&a);
        let c = vec![BigInt::from(2), BigInt::from(2)];
        let x = s.solve(&c).unwrap();
        assert_eq!(&x[0] * 2 + &x[1] * 4, BigInt::from(2));
        assert_eq!(&x[0] * 6 + &x[1] * 8, BigInt::from(2));
        assert!(s.solve(&[BigInt::from(1), BigInt::from(0)]).is_none());
    }
}
