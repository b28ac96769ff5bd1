//! Small dense types for 3-dimensional chart computations.

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Rank-3 array indexed `[i][j][k]`.
pub type Tensor3 = [[[f64; 3]; 3]; 3];

/// Rank-4 array indexed `[i][j][k][l]`.
pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];

pub const ZERO3: Tensor3 = [[[0.0; 3]; 3]; 3];
pub const ZERO4: Tensor4 = [[[[0.0; 3]; 3]; 3]; 3];

/// Levi-Civita permutation symbol.
pub fn permutation_sign(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub(crate) fn vec_from_slice(s: &[f64]) -> Vec3 {
    Vec3::new(s[0], s[1], s[2])
}

pub(crate) fn put(dst: &mut [f64], v: &Vec3) {
    dst[0] = v.x;
    dst[1] = v.y;
    dst[2] = v.z;
}

/// `max |a_ij - b_ij|`.
pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    (a - b).iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}
