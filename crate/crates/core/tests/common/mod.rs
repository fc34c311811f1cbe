#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realrad::facialred::find_exposing_vector;
use realrad::linalg::{orthonormal_columns, random_symmetric};
use realrad::{
    dr_solve, dr_step, ideal_closure, numerical_nullspace, project_affine, project_psd, restrict_operator, DRConfig,
    DRStatus, EigenDecomposition, KernelBasis, LinearOperator, MonomialBasis, Polynomial, SolverConfig,
};

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn random_psd(k: usize, rank: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let g = DMatrix::from_fn(k, rank, |_, _| r.random_range(-1.0..1.0));
    &g * g.transpose()
}

pub fn random_orthonormal(k: usize, r: usize, seed: u64) -> DMatrix<f64> {
    let mut g = rng(seed);
    let m = DMatrix::from_fn(k, r, |_, _| g.random_range(-1.0..1.0));
    orthonormal_columns(&m, 1e-12).unwrap()
}

pub fn random_operator(k: usize, l: usize, rhs: &DVector<f64>, seed: u64) -> LinearOperator<f64> {
    let mats = (0..l).map(|i| random_symmetric(k, seed * 1000 + i as u64)).collect();
    LinearOperator::new(k, mats, rhs.clone()).unwrap()
}

/// Operator with `l` random constraints whose right-hand side is `𝒜(x0)`.
pub fn operator_through(x0: &DMatrix<f64>, l: usize, seed: u64) -> LinearOperator<f64> {
    let k = x0.nrows();
    let op = random_operator(k, l, &DVector::zeros(l), seed);
    let b = op.apply(x0);
    LinearOperator::new(k, op.mats().to_vec(), b).unwrap()
}

fn sizes(seed: u64) -> (usize, usize) {
    let mut r = rng(seed ^ 0x5eed);
    let k = r.random_range(2..=6);
    let l = r.random_range(1..=(k * (k + 1) / 2 - 1).max(1));
    (k, l)
}

pub fn psd_projection_idempotent(seed: u64) -> Check {
    let (k, _) = sizes(seed);
    let x = random_symmetric::<f64>(k, seed) * 3.0;
    let p = project_psd(&x, k);
    let pp = project_psd(&p, k);
    ensure((&pp - &p).amax() <= 1e-10, || {
        format!("not idempotent: {:e}", (&pp - &p).amax())
    })?;
    let min = EigenDecomposition::new(&p).min();
    ensure(min >= -1e-12, || format!("min eigenvalue {min:e}"))
}

/// Exhaustive best PSD diagonal approximation of rank ≤ r.
pub fn eckart_young(seed: u64) -> Check {
    let mut g = rng(seed);
    let k = g.random_range(1..=4);
    let r = g.random_range(0..=k);
    let d: Vec<f64> = (0..k).map(|_| g.random_range(-2.0..2.0)).collect();
    let x = DMatrix::from_diagonal(&DVector::from_vec(d.clone()));
    let got = (project_psd(&x, r) - &x).norm();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize > r {
            continue;
        }
        let dist: f64 = (0..k)
            .map(|i| {
                let kept = if mask & (1 << i) != 0 { d[i].max(0.0) } else { 0.0 };
                (d[i] - kept).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        best = best.min(dist);
    }
    ensure((got - best).abs() <= 1e-10, || {
        format!("distance {got} vs oracle {best}")
    })
}

/// Least-norm correction `Q R⁻ᵀ (b − A x)` from a QR factorisation `Aᵀ = QR`.
pub fn affine_projection(seed: u64) -> Check {
    let (k, l) = sizes(seed);
    let b = DVector::from_fn(l, |i, _| (i as f64 + 1.0) * 0.3);
    let op = random_operator(k, l, &b, seed);
    let x = random_symmetric::<f64>(k, seed + 1);
    let y = random_symmetric::<f64>(k, seed + 2);
    let px = project_affine(&x, &op).map_err(|e| e.to_string())?;
    let py = project_affine(&y, &op).map_err(|e| e.to_string())?;
    let ppx = project_affine(&px, &op).map_err(|e| e.to_string())?;
    ensure((&ppx - &px).amax() <= 1e-10, || {
        format!("not idempotent: {:e}", (&ppx - &px).amax())
    })?;
    ensure((&px - &py).norm() <= (&x - &y).norm() + 1e-10, || "expansive".into())?;
    ensure(op.residual(&px) <= 1e-12 * (1.0 + b.norm()) * 10.0, || {
        format!("residual {:e}", op.residual(&px))
    })?;
    let a = op.matrix_rep();
    let qr = a.transpose().qr();
    let xv = realrad::linalg::vec_rows(&x);
    let w = qr
        .r()
        .transpose()
        .solve_lower_triangular(&(&b - &a * &xv))
        .ok_or("rank deficient")?;
    let oracle = realrad::linalg::unvec_rows(&(xv + qr.q() * w), k);
    ensure((&oracle - &px).amax() <= 1e-9, || {
        format!("oracle mismatch {:e}", (&oracle - &px).amax())
    })
}

pub fn adjoint_identity(seed: u64) -> Check {
    let (k, l) = sizes(seed);
    let op = random_operator(k, l, &DVector::zeros(l), seed);
    let x = random_symmetric::<f64>(k, seed + 7);
    let y = DVector::from_fn(l, |i, _| ((seed + i as u64) % 7) as f64 - 3.0);
    let lhs = op.apply(&x).dot(&y);
    let rhs = op.adjoint(&y).component_mul(&x).sum();
    ensure((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()), || {
        format!("{lhs} vs {rhs}")
    })
}

/// `𝒜(U M Uᵀ) = (Uᵀ𝒜U)(M)`.
pub fn lemma_restriction(seed: u64) -> Check {
    let (k, l) = sizes(seed);
    let r = 1 + (seed as usize) % k;
    let op = random_operator(k, l, &DVector::zeros(l), seed);
    let u = random_orthonormal(k, r, seed + 3);
    let m = random_psd(r, r, seed + 4);
    let restricted = restrict_operator(&op, &u).map_err(|e| e.to_string())?;
    let diff = (op.apply(&(&u * &m * u.transpose())) - restricted.apply(&m)).amax();
    ensure(diff <= 1e-8, || format!("restriction mismatch {diff:e}"))
}

/// `Z ∈ F*` iff `UᵀZU ⪰ 0`, and `Z ∈ F^⊥` iff `UᵀZU = 0`, for
/// `F = U 𝒮₊ Uᵀ`.
pub fn lemma_dual_face(seed: u64) -> Check {
    let (k, _) = sizes(seed);
    let r = 1 + (seed as usize) % k;
    let u = random_orthonormal(k, r, seed);
    // Z positive on the face plus an arbitrary part orthogonal to it
    let w = random_psd(r, 1 + (seed as usize) % r, seed + 1);
    let w = &w / w.norm();
    let q = DMatrix::identity(k, k) - &u * u.transpose();
    let noise = random_symmetric::<f64>(k, seed + 2);
    let z = &u * &w * u.transpose() + &q * noise * &q;
    let reduced = u.transpose() * &z * &u;
    ensure(EigenDecomposition::new(&reduced).min() >= -1e-10, || {
        "UᵀZU not PSD".into()
    })?;
    let mut positive = false;
    for s in 0..20 {
        let m = random_psd(r, r, seed + 100 + s);
        let t = z.component_mul(&(&u * &m * u.transpose())).sum();
        ensure(t >= -1e-8, || format!("negative pairing {t:e}"))?;
        positive |= t > 1e-8;
    }
    ensure(positive, || "Z vanishes on the face".into())?;
    // a matrix negative somewhere on the face pairs negatively with it
    let bad = &z - &u * DMatrix::identity(r, r) * u.transpose() * (w.norm() + 1.0);
    let e = EigenDecomposition::new(&(u.transpose() * &bad * &u));
    let v = e.vectors.column(r - 1).into_owned();
    let x = &u * &v * v.transpose() * u.transpose();
    ensure(bad.component_mul(&x).sum() < -1e-8, || {
        "dual membership not detected".into()
    })?;
    // F^⊥: the orthogonal part pairs to zero
    let perp = &q * random_symmetric::<f64>(k, seed + 9) * &q;
    let m = random_psd(r, r, seed + 10);
    let t = perp.component_mul(&(&u * m * u.transpose())).sum();
    ensure(t.abs() <= 1e-8, || format!("F^⊥ pairing {t:e}"))
}

/// For `Z ⪰ 0` on the face and `V` spanning its nullspace, every
/// `X = U V M Vᵀ Uᵀ` is orthogonal to `Z` and stays in the face.
pub fn lemma_face_update(seed: u64) -> Check {
    let mut g = rng(seed);
    let k = g.random_range(3..=6);
    let r = g.random_range(2..=k);
    let s = g.random_range(1..r);
    let u = random_orthonormal(k, r, seed);
    let w = random_psd(r, s, seed + 1);
    let z = &u * &w * u.transpose();
    let v = numerical_nullspace(&w, 1e-8);
    ensure(v.ncols() == r - s, || format!("nullspace {} != {}", v.ncols(), r - s))?;
    let m = random_psd(v.ncols(), v.ncols(), seed + 2);
    let uv = &u * &v;
    let x = &uv * m * uv.transpose();
    let t = z.component_mul(&x).sum();
    ensure(t.abs() <= 1e-8 * (1.0 + x.norm()), || format!("trace(ZX) = {t:e}"))?;
    let q = DMatrix::identity(k, k) - &u * u.transpose();
    ensure((&q * &x).amax() <= 1e-8, || "left the face".into())?;
    ensure(
        EigenDecomposition::new(&(u.transpose() * &x * &u)).min() >= -1e-8,
        || "not PSD".into(),
    )
}

/// A problem whose feasible set lies in a proper face; the exposing vector
/// must annihilate a known feasible point.
pub fn exposing_vector_orthogonality(seed: u64) -> Check {
    let mut g = rng(seed);
    let k = g.random_range(2..=4);
    let rank = g.random_range(1..k);
    let x0 = random_psd(k, rank, seed);
    let nullv = numerical_nullspace(&x0, 1e-10);
    let mut mats: Vec<DMatrix<f64>> = vec![nullv.column(0) * nullv.column(0).transpose()];
    let mut rhs = vec![0.0];
    mats.push(DMatrix::identity(k, k));
    rhs.push(x0.trace());
    for i in 0..g.random_range(0..=2) {
        let a = random_symmetric::<f64>(k, seed * 31 + i);
        rhs.push(a.component_mul(&x0).sum());
        mats.push(a);
    }
    let op = LinearOperator::new(k, mats, DVector::from_vec(rhs)).unwrap();
    // Instances whose face has singularity degree two converge sublinearly;
    // a longer plateau lets most of them finish.
    let cfg = SolverConfig {
        stall_window: 2000,
        ..Default::default()
    };
    let s = find_exposing_vector(&op, &cfg, 2).map_err(|e| e.to_string())?;
    let z =
        s.z.ok_or_else(|| format!("no exposing vector found, residual {:e}", s.residual))?;
    let t = z.component_mul(&x0).sum();
    ensure(t.abs() <= 1e-8 * x0.norm(), || format!("trace(ZX) = {t:e}"))?;
    ensure(EigenDecomposition::new(&z).min() >= -1e-10, || "Z not PSD".into())
}

/// Random constraints through the identity: Slater holds, so the
/// auxiliary problem has no solution.
pub fn slater_has_no_exposing_vector(seed: u64) -> Check {
    let k = 2 + (seed as usize) % 2;
    let op = operator_through(&DMatrix::identity(k, k), 2, seed);
    let cfg = SolverConfig {
        max_dr_iters: 4000,
        ..Default::default()
    };
    let s = find_exposing_vector(&op, &cfg, 2).map_err(|e| e.to_string())?;
    ensure(s.z.is_none(), || {
        format!("spurious exposing vector, residual {:e}", s.residual)
    })
}

pub fn dr_fixed_point_and_determinism(seed: u64) -> Check {
    let k = 2 + (seed as usize) % 3;
    let x0 = random_psd(k, k, seed) + DMatrix::identity(k, k);
    let op = operator_through(&x0, 2, seed);
    let (x_new, _) = dr_step(&x0, &op, k).map_err(|e| e.to_string())?;
    ensure((&x_new - &x0).amax() <= 1e-10, || "feasible PSD point moved".into())?;
    let cfg = DRConfig {
        seed,
        ..Default::default()
    };
    let a = dr_solve(&op, &cfg, None).map_err(|e| e.to_string())?;
    let b = dr_solve(&op, &cfg, None).map_err(|e| e.to_string())?;
    ensure(a.history == b.history && a.y == b.y, || "non-deterministic".into())?;
    ensure(a.status == DRStatus::Converged, || {
        format!("{:?} at {:e}", a.status, a.residual)
    })?;
    ensure(
        a.residual <= 1e-13 && EigenDecomposition::new(&a.y).min() >= -1e-10,
        || "converged iterate infeasible".into(),
    )?;
    let best = a.history.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(best == a.residual, || "returned residual is not the best seen".into())
}

// ---- exact closure oracle ----

type Q = BigRational;

fn exact_rref(rows: &mut Vec<Vec<Q>>, order: &[usize]) {
    let mut done = 0;
    for &c in order {
        let Some(p) = (done..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(done, p);
        let inv = Q::one() / rows[done][c].clone();
        for v in rows[done].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pr = rows[done].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != done && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pr) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        done += 1;
    }
    rows.truncate(done);
}

/// Dimension of the prolong–project closure computed in exact arithmetic
/// by enumerating every monomial multiple of every low-degree element.
pub fn exact_closure_dim(polys: &[Vec<i64>], basis: &MonomialBasis) -> usize {
    let k = basis.len();
    let d = basis.degree();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        basis
            .monomial(b)
            .degree()
            .cmp(&basis.monomial(a).degree())
            .then(a.cmp(&b))
    });
    let mut rows: Vec<Vec<Q>> = polys
        .iter()
        .map(|p| p.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect())
        .collect();
    exact_rref(&mut rows, &order);
    loop {
        let before = rows.len();
        let mut next = rows.clone();
        for row in &rows {
            // pivot-first order: a row's degree is that of its first nonzero in `order`
            let deg = order
                .iter()
                .find(|&&c| !row[c].is_zero())
                .map(|&c| basis.monomial(c).degree())
                .unwrap_or(0);
            for g in 1..basis.count_up_to(d - deg) {
                let mut v = vec![Q::zero(); k];
                for (i, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        v[basis.product_position(i, g).unwrap()] += c.clone();
                    }
                }
                next.push(v);
            }
        }
        exact_rref(&mut next, &order);
        rows = next;
        if rows.len() == before {
            return before;
        }
    }
}

pub fn closure_matches_brute_force(seed: u64) -> Check {
    let mut g = rng(seed);
    let d = g.random_range(1..=3);
    let basis = MonomialBasis::new(2, d);
    let k = basis.len();
    let m = g.random_range(1..=3);
    let polys: Vec<Vec<i64>> = (0..m)
        .map(|_| {
            (0..k)
                .map(|_| if g.random_bool(0.4) { g.random_range(-3..=3) } else { 0 })
                .collect()
        })
        .collect();
    let exact = exact_closure_dim(&polys, &basis);
    let fl: Vec<Polynomial<f64>> = polys
        .iter()
        .map(|p| {
            let v = DVector::from_iterator(k, p.iter().map(|&c| c as f64));
            realrad::poly_of(&v, &basis).unwrap()
        })
        .collect();
    let kb = KernelBasis::from_polys(&fl, &basis).map_err(|e| e.to_string())?;
    let (c, _) = ideal_closure(&kb, 1e-6).map_err(|e| e.to_string())?;
    ensure(c.dim() == exact, || {
        format!("closure dim {} vs exact {exact} for {polys:?} at d={d}", c.dim())
    })
}

/// Exact rank of an integer matrix given by rows.
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut q: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| r.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect())
        .collect();
    let order: Vec<usize> = (0..rows[0].len()).collect();
    exact_rref(&mut q, &order);
    q.len()
}
