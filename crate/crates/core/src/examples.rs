//! Built-in reference systems with their known reduction paths.

use crate::error::Result;
use crate::momentprob::{build_moment_problem, MomentProblem};
use crate::polysys::{parse_system, Polynomial};

/// A polynomial system together with the face sizes and rank that
/// facial reduction of its moment problem is expected to produce.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub nvars: usize,
    pub degree: usize,
    /// System in the text format accepted by [`crate::parse_system`].
    pub system: &'static str,
    pub face_sizes: &'static [usize],
    pub rank: usize,
}

impl Example {
    pub fn polys(&self) -> Vec<Polynomial<f64>> {
        parse_system(self.system, self.nvars).expect("built-in systems parse")
    }

    /// Moment problem of the system as given, without prolongation.
    pub fn problem(&self) -> Result<MomentProblem<f64>> {
        build_moment_problem(&self.polys(), self.degree)
    }
}

pub const REDUCIBLE_CUBIC: Example = Example {
    name: "reducible-cubic",
    description: "(x+y)(x^2+y^2+2): real variety is the line x+y=0",
    nvars: 2,
    degree: 3,
    system: "(x+y)*(x^2+y^2+2)",
    face_sizes: &[10, 9, 4],
    rank: 4,
};

pub const REDUCIBLE_QUINTIC: Example = Example {
    name: "reducible-quintic",
    description: "(1+x+y)(x^4+y^4+2): real variety is the line 1+x+y=0",
    nvars: 2,
    degree: 5,
    system: "(1+x+y)*(x^4+y^4+2)",
    face_sizes: &[21, 20, 6],
    rank: 6,
};

pub const GEOMETRIC_CUBIC: Example = Example {
    name: "geometric-cubic",
    description: "1+(x+y)+(x+y)^2+(x+y)^3: real variety is the line x+y=-1",
    nvars: 2,
    degree: 3,
    system: "1 + (x+y) + (x+y)^2 + (x+y)^3",
    face_sizes: &[10, 9, 7, 4],
    rank: 4,
};

pub const THREE_VARIABLE: Example = Example {
    name: "three-variable",
    description: "2yz-y, 2y^2+y, xy, 4x^2z+4z^3+y in x, y, z",
    nvars: 3,
    degree: 3,
    system: "2*y*z - y; 2*y^2 + y; x*y; 4*x^2*z + 4*z^3 + y",
    face_sizes: &[20, 16, 14, 8],
    rank: 8,
};

pub const ALL: [Example; 4] = [REDUCIBLE_CUBIC, REDUCIBLE_QUINTIC, GEOMETRIC_CUBIC, THREE_VARIABLE];

pub fn by_name(name: &str) -> Option<&'static Example> {
    ALL.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::{binomial, system_degree};

    #[test]
    fn systems_parse_at_their_degree() {
        for e in &ALL {
            let f = e.polys();
            assert!(system_degree(&f) <= e.degree);
            assert_eq!(e.face_sizes[0], binomial(e.nvars + e.degree, e.nvars));
            assert_eq!(*e.face_sizes.last().unwrap(), e.rank);
        }
        assert_eq!(by_name("geometric-cubic"), Some(&GEOMETRIC_CUBIC));
        assert!(by_name("nope").is_none());
    }
}
