mod oracle;

use tricode_core::lattice::Orientation;
use tricode_core::{Lattice, PauliOperator, StringKind};

fn product(ops: impl Iterator<Item = PauliOperator>, n: usize) -> PauliOperator {
    ops.fold(PauliOperator::identity(n), |acc, p| acc.multiply(&p).unwrap())
}

fn stabilizers(lat: &Lattice) -> (Vec<PauliOperator>, Vec<PauliOperator>) {
    let stars = (0..lat.n_vertices()).map(|s| lat.star_operator(s).unwrap()).collect();
    let plaqs = (0..lat.n_triangles()).map(|p| lat.plaquette_operator(p).unwrap()).collect();
    (stars, plaqs)
}

#[test]
fn stabilizer_products_are_the_identity() {
    for (lx, ly) in [(3, 3), (6, 6), (5, 7)] {
        let lat = Lattice::new(lx, ly).unwrap();
        let (stars, plaqs) = stabilizers(&lat);
        let n = lat.n_edges();
        let a = product(stars.into_iter(), n);
        let b = product(plaqs.into_iter(), n);
        assert_eq!(a, PauliOperator::identity(n));
        assert_eq!(b, PauliOperator::identity(n));
    }
}

#[test]
fn stabilizer_rank_and_logical_completion() {
    for (lx, ly) in [(3, 3), (4, 4), (6, 6), (4, 5)] {
        let lat = Lattice::new(lx, ly).unwrap();
        let (stars, plaqs) = stabilizers(&lat);
        let mut ops: Vec<PauliOperator> = stars.into_iter().chain(plaqs).collect();
        assert_eq!(oracle::gf2_rank(&ops), 3 * lx * ly - 2);
        ops.push(lat.zigzag_loop(0, StringKind::Wilson).unwrap());
        ops.push(lat.zigzag_loop(0, StringKind::THooft).unwrap());
        assert_eq!(oracle::gf2_rank(&ops), lat.n_edges());
    }
}

fn anticommuting(op: &PauliOperator, set: &[PauliOperator]) -> Vec<usize> {
    (0..set.len()).filter(|&i| !op.commutes(&set[i]).unwrap()).collect()
}

#[test]
fn open_strings_violate_two_stabilizers() {
    let lat = Lattice::new(6, 6).unwrap();
    let (stars, plaqs) = stabilizers(&lat);
    for y in 0..6 {
        for x0 in 0..6 {
            for r in 1..6 {
                let w = lat.zigzag_string(x0, y, r, StringKind::Wilson).unwrap();
                let ends = anticommuting(&w, &stars);
                let mut expected =
                    vec![lat.vertex_index(x0 as i64, y as i64), lat.vertex_index((x0 + r) as i64, y as i64)];
                expected.sort();
                assert_eq!(ends, expected, "W({x0},{y},{r})");
                assert!(anticommuting(&w, &plaqs).is_empty());

                let t = lat.zigzag_string(x0, y, r, StringKind::THooft).unwrap();
                let tris = anticommuting(&t, &plaqs);
                assert_eq!(tris.len(), 2, "T({x0},{y},{r})");
                assert!(tris.iter().all(|&p| lat.triangle(p).orientation == Orientation::Down));
                assert!(anticommuting(&t, &stars).is_empty());
            }
        }
    }
}

#[test]
fn loops_commute_with_every_stabilizer() {
    let lat = Lattice::new(6, 6).unwrap();
    let (stars, plaqs) = stabilizers(&lat);
    for y in 0..6 {
        for kind in [StringKind::Wilson, StringKind::THooft] {
            let l = lat.zigzag_loop(y, kind).unwrap();
            assert!(anticommuting(&l, &stars).is_empty());
            assert!(anticommuting(&l, &plaqs).is_empty());
        }
        // W^c(y) and T^c(y) share an even number of edges.
        let w = lat.zigzag_loop(y, StringKind::Wilson).unwrap();
        assert!(w.commutes(&lat.zigzag_loop(0, StringKind::THooft).unwrap()).unwrap());
    }
}
