//! The diagonal automorphism group `H = ker e^M` and its sign part.

use serde::Serialize;

use super::system::SigmaSystem;
use crate::diagram::RootMatrix;
use crate::exactla::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeGroup {
    /// `dim ker M`, the identity component of `H`.
    pub connected_dim: usize,
    /// Integer basis of `ker M`; `exp(t v)` rescales `e_i` by `e^{t v_i}`.
    #[serde(serialize_with = "ser_basis")]
    pub kernel: Vec<Vec<Rational>>,
    /// Basis of `ker M_2`: sign flips preserving every structure constant.
    pub sign_kernel: Vec<Vec<bool>>,
    /// Basis of `G_σ`, the σ-invariant sign flips in `ker M_2`, when a
    /// nontrivial involution was given.
    pub sigma_sign_kernel: Option<Vec<Vec<bool>>>,
}

#[allow(clippy::ptr_arg)]
fn ser_basis<S: serde::Serializer>(v: &Vec<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|k| k.iter().map(format_rational).collect::<Vec<_>>()))
}

pub fn gauge_group(rm: &RootMatrix) -> GaugeGroup {
    let kernel = rm.rational().kernel();
    GaugeGroup { connected_dim: kernel.len(), kernel, sign_kernel: rm.gf2().kernel(), sigma_sign_kernel: None }
}

/// As [`gauge_group`], with `G_σ` lifted from the orbit-reduced GF(2) matrix.
pub fn gauge_group_sigma(sys: &SigmaSystem) -> GaugeGroup {
    let mut group = gauge_group(&sys.root);
    if !sys.sigma.is_identity() {
        let n = sys.node_orbit_of.len();
        let lifted = sys
            .reduced2
            .kernel()
            .into_iter()
            .map(|k| (0..n).map(|i| k[sys.node_orbit_of[i]]).collect())
            .collect();
        group.sigma_sign_kernel = Some(lifted);
    }
    group
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{build_diagram, Involution};
    use crate::exactla::int;
    use crate::lie::StructureConstants;

    fn group(t: &str) -> GaugeGroup {
        gauge_group(&build_diagram(&StructureConstants::parse_tuple(t).unwrap()).unwrap().root_matrix())
    }

    #[test]
    fn full_rank_is_trivial() {
        let g = group("(0,0,0,0,e^{12},e^{34},e^{15}+e^{24}+e^{36},e^{13}+e^{25}+e^{46})");
        assert_eq!(g.connected_dim, 0);
        assert!(g.sign_kernel.is_empty());
    }

    #[test]
    fn one_parameter_group() {
        let g = group("(0,0,0,0,e^{13}+e^{24},- e^{12},e^{34},e^{15}+e^{23}+e^{46},e^{14}+e^{27}+e^{35})");
        assert_eq!(g.connected_dim, 1);
        // diag(k, k^2, 1/k, 1/k^2, 1, k^3, 1/k^3, k, 1/k)
        let expected: Vec<Rational> = [1, 2, -1, -2, 0, 3, -3, 1, -1].into_iter().map(int).collect();
        assert_eq!(g.kernel[0], expected);
    }

    #[test]
    fn abelian_is_everything() {
        let g = group("(0,0,0)");
        assert_eq!(g.connected_dim, 3);
        assert_eq!(g.sign_kernel.len(), 3);
    }

    #[test]
    fn sigma_part_is_invariant() {
        let sc = StructureConstants::parse_tuple("(0,0,e^{12})").unwrap();
        let sys = SigmaSystem::new(&sc, &Involution::parse("(1,2)", 3).unwrap()).unwrap();
        let g = gauge_group_sigma(&sys);
        for v in g.sigma_sign_kernel.unwrap() {
            assert_eq!(v[0], v[1]);
        }
    }
}
