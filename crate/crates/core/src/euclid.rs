//! Exact grid actions of the plane Euclidean subgroup that preserves the
//! node set: whole-node translations, axis reflections and quarter-turn
//! rotations. (T_g v)(x) = v(g^{-1} x); all index arithmetic is exact, so
//! equivariance tests see no interpolation error.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Orthogonal part of a grid-exact group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orthogonal {
    Identity,
    /// x1 -> -x1.
    ReflectX1,
    /// x2 -> -x2.
    ReflectX2,
    /// Counterclockwise rotation by 90 degrees (2D only).
    Rotate90,
    Rotate180,
    Rotate270,
}

impl Orthogonal {
    pub fn inverse(&self) -> Orthogonal {
        match self {
            Orthogonal::Rotate90 => Orthogonal::Rotate270,
            Orthogonal::Rotate270 => Orthogonal::Rotate90,
            o => *o,
        }
    }

    /// Apply to an integer node vector (units of dx).
    fn apply(&self, v: [i64; 2]) -> [i64; 2] {
        match self {
            Orthogonal::Identity => v,
            Orthogonal::ReflectX1 => [-v[0], v[1]],
            Orthogonal::ReflectX2 => [v[0], -v[1]],
            Orthogonal::Rotate90 => [-v[1], v[0]],
            Orthogonal::Rotate180 => [-v[0], -v[1]],
            Orthogonal::Rotate270 => [v[1], -v[0]],
        }
    }
}

/// g = (translation, orthogonal part) acting by g x = r x + a, with the
/// translation in whole node multiples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupElement {
    pub shift_nodes: [i64; 2],
    pub orthogonal: Orthogonal,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            shift_nodes: [0, 0],
            orthogonal: Orthogonal::Identity,
        }
    }

    pub fn translation(n1: i64, n2: i64) -> Self {
        GroupElement {
            shift_nodes: [n1, n2],
            orthogonal: Orthogonal::Identity,
        }
    }

    pub fn reflection_x1() -> Self {
        GroupElement {
            shift_nodes: [0, 0],
            orthogonal: Orthogonal::ReflectX1,
        }
    }

    pub fn reflection_x2() -> Self {
        GroupElement {
            shift_nodes: [0, 0],
            orthogonal: Orthogonal::ReflectX2,
        }
    }

    pub fn rotation_quarter_turns(k: u8) -> Self {
        let orthogonal = match k % 4 {
            0 => Orthogonal::Identity,
            1 => Orthogonal::Rotate90,
            2 => Orthogonal::Rotate180,
            _ => Orthogonal::Rotate270,
        };
        GroupElement {
            shift_nodes: [0, 0],
            orthogonal,
        }
    }

    /// g^{-1} = (-r^{-1} a, r^{-1}).
    pub fn inverse(&self) -> GroupElement {
        let rinv = self.orthogonal.inverse();
        let moved = rinv.apply(self.shift_nodes);
        GroupElement {
            shift_nodes: [-moved[0], -moved[1]],
            orthogonal: rinv,
        }
    }
}

/// Node index permutation realizing x -> g^{-1} x on the periodic grid.
///
/// Node j has coordinate -L + j dx; negation maps j -> (n - j) mod n, which
/// fixes the j = 0 node (-L and +L are identified).
fn pull_index(spec: &GridSpec, g: &GroupElement, i1: usize, i2: usize) -> (usize, usize) {
    let n = spec.n as i64;
    let half = n / 2;
    // integer coordinates relative to the origin node (index n/2)
    let c = [i1 as i64 - half, i2 as i64 - half];
    let ginv = g.inverse();
    let r = ginv.orthogonal.apply(c);
    let m1 = (r[0] + ginv.shift_nodes[0] + half).rem_euclid(n);
    let m2 = (r[1] + ginv.shift_nodes[1] + half).rem_euclid(n);
    (m1 as usize, m2 as usize)
}

/// Exact node permutation (T_g u)(x) = u(g^{-1} x), periodic wrap for
/// translations. 1D fields accept only translations and the x1 reflection.
pub fn act(g: &GroupElement, u: &Field) -> Result<Field> {
    let spec = *u.spec();
    if spec.dim == 1 {
        match g.orthogonal {
            Orthogonal::Identity | Orthogonal::ReflectX1 => {}
            o => {
                return Err(Error::UnsupportedGroupElement(format!(
                    "{o:?} does not act on a 1D grid"
                )))
            }
        }
        if g.shift_nodes[1] != 0 {
            return Err(Error::UnsupportedGroupElement(
                "x2 translation on a 1D grid".into(),
            ));
        }
        let n = spec.n as i64;
        let half = n / 2;
        let ginv = g.inverse();
        let mut out = vec![0.0; spec.len()];
        for (j, v) in out.iter_mut().enumerate() {
            let c = j as i64 - half;
            let r = match ginv.orthogonal {
                Orthogonal::ReflectX1 => -c,
                _ => c,
            };
            let m = (r + ginv.shift_nodes[0] + half).rem_euclid(n);
            *v = u.at(m as usize);
        }
        return Field::new(spec, out);
    }

    let n = spec.n;
    let mut out = vec![0.0; spec.len()];
    crate::par::for_each_row_mut(&mut out, n, |i1, row| {
        for (i2, v) in row.iter_mut().enumerate() {
            let (m1, m2) = pull_index(&spec, g, i1, i2);
            *v = u.at(m1 * n + m2);
        }
    });
    Field::new(spec, out)
}
