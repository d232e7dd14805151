use crate::scalar::C;
use crate::subspace::Mat;

pub fn c(x: f64) -> C<f64> {
    C::new(x, 0.0)
}

pub fn eye(n: usize) -> Mat<f64> {
    crate::mats::eye(n)
}

pub fn unit(n: usize, i: usize, j: usize) -> Mat<f64> {
    crate::mats::unit(n, i, j)
}

pub fn diag(d: &[f64]) -> Mat<f64> {
    crate::mats::diag(d)
}
