use std::collections::HashMap;

use rla4::catalog::{equivalence, lie_representative, restricted_representative, rows_for_family};
use rla4::iso_search::{automorphism_group, restricted_isomorphic, SearchBudget};
use rla4::restricted::{
    conjugate, enumerate_pmaps, invariant_profile, PSemilinearMap, RestrictedLieAlgebra,
};
use rla4::substrate::field::{field_make, FieldElement};
use rla4::substrate::matrix::Matrix;

fn flags(rla: &RestrictedLieAlgebra) -> [usize; 8] {
    let f = rla.algebra().field();
    let m = rla.pmap();
    let e = |i: usize| -> Vec<FieldElement> {
        (0..4).map(|j| if i == j { f.one() } else { f.zero() }).collect()
    };
    let d0 = vec![e(1)];
    let z0 = vec![e(1), e(2)];
    let mut dr = d0.clone();
    let mut zr = z0.clone();
    let mut out = [0usize; 8];
    for r in 0..4 {
        dr = dr.iter().map(|v| m.eval_coords(v)).collect();
        zr = zr.iter().map(|v| m.eval_coords(v)).collect();
        let mut dd = d0.clone();
        dd.extend(dr.iter().cloned());
        let mut dz = d0.clone();
        dz.extend(zr.iter().cloned());
        out[2 * r] = Matrix::from_rows(f, &dd).rank();
        out[2 * r + 1] = Matrix::from_rows(f, &dz).rank();
    }
    out
}

fn main() {
    let f = field_make(2, 1).unwrap();
    let alg = lie_representative("L2", &[], f).unwrap();
    let maps: Vec<PSemilinearMap> = enumerate_pmaps(&alg).unwrap().collect();
    let budget = SearchBudget::default();
    let auts = automorphism_group(&alg, &budget).unwrap();
    let key = |m: &PSemilinearMap| -> Vec<u64> {
        (0..4).flat_map(|j| m.image_coords(j).iter().map(|x| x.residue())).collect()
    };
    let index: HashMap<Vec<u64>, usize> =
        maps.iter().enumerate().map(|(i, m)| (key(m), i)).collect();
    let mut orbit_of: Vec<Option<usize>> = vec![None; maps.len()];
    let mut orbit_count = 0usize;
    for start in 0..maps.len() {
        if orbit_of[start].is_some() {
            continue;
        }
        let id = orbit_count;
        orbit_count += 1;
        orbit_of[start] = Some(id);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for a in &auts {
                let c = conjugate(&maps[i], a.matrix()).unwrap();
                let t = index[&key(&c)];
                if orbit_of[t].is_none() {
                    orbit_of[t] = Some(id);
                    stack.push(t);
                }
            }
        }
    }
    println!("orbits: {orbit_count}");

    let mut row_orbit: Vec<(String, usize)> = Vec::new();
    for r in rows_for_family("L2") {
        if !r.char_cond.admits(2) {
            continue;
        }
        let choices: Vec<Vec<FieldElement>> = match r.param.arity() {
            0 => vec![vec![]],
            _ => vec![vec![f.from_int(0)], vec![f.from_int(1)]],
        };
        for params in choices {
            let rla = restricted_representative(r.id, &params, f).unwrap();
            let k = key(rla.pmap());
            let vals: Vec<u64> = params.iter().map(|x| x.residue()).collect();
            row_orbit.push((format!("{}{vals:?}", r.id), orbit_of[index[&k]].unwrap()));
        }
    }
    for oid in 0..orbit_count {
        let rep = (0..maps.len()).find(|&i| orbit_of[i] == Some(oid)).unwrap();
        let size = orbit_of.iter().filter(|o| **o == Some(oid)).count();
        let rows: Vec<&str> =
            row_orbit.iter().filter(|(_, o)| *o == oid).map(|(l, _)| l.as_str()).collect();
        println!("orbit {oid:2} size {size:3} rep {:?} rows {rows:?}", key(&maps[rep]));
    }

    for oid in 0..orbit_count {
        if row_orbit.iter().any(|(_, o)| *o == oid) {
            continue;
        }
        let rep = (0..maps.len()).find(|&i| orbit_of[i] == Some(oid)).unwrap();
        'found: for deg in 2..=4u32 {
            let fk = field_make(2, deg).unwrap();
            let algk = lie_representative("L2", &[], fk).unwrap();
            let imgs: Vec<Vec<FieldElement>> = (0..4)
                .map(|j| {
                    maps[rep]
                        .image_coords(j)
                        .iter()
                        .map(|c| fk.from_int(c.residue() as i64))
                        .collect()
                })
                .collect();
            let repk =
                RestrictedLieAlgebra::new(&algk, PSemilinearMap::new(&algk, imgs)).unwrap();
            let prof = invariant_profile(&repk, 4).unwrap();
            let fl = flags(&repk);

            let mut targets: Vec<(String, RestrictedLieAlgebra)> = Vec::new();
            for r in rows_for_family("L2") {
                if !r.char_cond.admits(2) {
                    continue;
                }
                if r.param.arity() == 0 {
                    targets.push((
                        r.id.to_string(),
                        restricted_representative(r.id, &[], fk).unwrap(),
                    ));
                } else {
                    let mut reps: Vec<FieldElement> = Vec::new();
                    for lam in fk.elements() {
                        if !reps.iter().any(|q| equivalence(r.id, &[lam], &[*q]).unwrap()) {
                            reps.push(lam);
                        }
                    }
                    for lam in reps {
                        targets.push((
                            format!("{}(lam={lam})", r.id),
                            restricted_representative(r.id, &[lam], fk).unwrap(),
                        ));
                    }
                }
            }
            let cands: Vec<&(String, RestrictedLieAlgebra)> = targets
                .iter()
                .filter(|(_, t)| invariant_profile(t, 4).unwrap() == prof && flags(t) == fl)
                .collect();
            println!(
                "orbit {oid} deg {deg}: candidates {:?}",
                cands.iter().map(|(l, _)| l).collect::<Vec<_>>()
            );
            for (label, t) in cands {
                if restricted_isomorphic(&repk, t, &budget).unwrap().is_some() {
                    println!("orbit {oid} => {label} at degree {deg}");
                    break 'found;
                }
                println!("orbit {oid}: NEGATIVE against {label} at degree {deg}");
            }
        }
    }
}
