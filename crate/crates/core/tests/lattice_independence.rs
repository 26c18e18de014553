use adjointforge::bitset::{self, bit};
use adjointforge::catalog;
use adjointforge::family::SetFamily;
use adjointforge::lattice::{lattice_of_flats, FiniteLattice};
use adjointforge::nbb::{self, LatticeOp};

fn pruned_uniform() -> (Vec<u64>, FiniteLattice) {
    catalog::pruned_uniform_lattice()
}

/// Ground element of each atom of a lattice of sets built from singletons.
fn atom_labels(l: &FiniteLattice, sets: &[u64]) -> Vec<usize> {
    l.atoms().iter().map(|&a| sets[a].trailing_zeros() as usize).collect()
}

#[test]
fn pruned_uniform_keeps_uniform_independents() {
    let (sets, l) = pruned_uniform();
    assert!(l.is_atomic());
    let fam = nbb::independence_family(&l).remap(&atom_labels(&l, &sets), 6);
    assert_eq!(fam, catalog::uniform(4, 6).independents());
}

#[test]
fn pruned_uniform_contraction_is_not_a_matroid() {
    let (sets, l) = pruned_uniform();
    let atom0 = l.atoms().iter().copied().find(|&a| l.support(a) == bit(0)).unwrap();
    let (c, map) = l.contract(atom0).unwrap();
    // atoms of the contraction are pairs {0, j}; label them by j
    let label: Vec<usize> = c
        .atoms()
        .iter()
        .map(|&y| (sets[map.apply(y)] & !bit(0)).trailing_zeros() as usize)
        .collect();
    let fam = nbb::independence_family(&c).remap(&label, 6);
    // U(3,5) on {1..5} minus {1,2,3} and {1,2,5}
    let missing = [0b001110u64, 0b100110];
    let expected = SetFamily::new(
        6,
        bitset::submasks(0b111110).filter(|&s| bitset::size(s) <= 3 && !missing.contains(&s)),
    );
    assert_eq!(fam, expected);
    assert!(!nbb::check_matroid(&fam).unwrap());
    assert!(nbb::verify_lattice_op_families(&l, LatticeOp::Contract(atom0)).unwrap());
}

#[test]
fn flats_of_catalog_matroids() {
    for name in ["K4", "Fano", "NonFano", "Q6", "R6", "P6"] {
        let m = catalog::by_name(name).unwrap();
        let lf = lattice_of_flats(&m);
        let l = &lf.lattice;
        for x in 0..l.len() {
            if l.rank(x) >= 1 {
                assert!(nbb::verify_lattice_op_families(l, LatticeOp::Restrict(x)).unwrap());
            }
        }
        for k in 2..=l.height() {
            assert!(nbb::verify_lattice_op_families(l, LatticeOp::Truncate(k)).unwrap());
        }
        assert!(nbb::verify_lattice_op_families(l, LatticeOp::Dual).unwrap(), "{name}");
    }
}
