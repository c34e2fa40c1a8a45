#![allow(dead_code)]

use qsurrogate::seed;
use rand::Rng;

/// DBSCAN by connected components over core points. Clusters are numbered by
/// their smallest core index; a border point joins the lowest-numbered
/// cluster among its core neighbours.
pub fn brute_dbscan(x: &[Vec<f64>], eps: f64, min_pts: usize) -> Vec<i64> {
    let n = x.len();
    let close = |i: usize, j: usize| {
        let d: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        d <= eps
    };
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| close(i, j)).count() >= min_pts).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if core[i] && core[j] && close(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }

    let mut cluster_of_root = vec![-1i64; n];
    let mut next = 0;
    let mut labels = vec![-1i64; n];
    for i in 0..n {
        if core[i] {
            let r = find(&mut parent, i);
            if cluster_of_root[r] < 0 {
                cluster_of_root[r] = next;
                next += 1;
            }
            labels[i] = cluster_of_root[r];
        }
    }
    for i in 0..n {
        if !core[i] {
            labels[i] = (0..n)
                .filter(|&j| core[j] && close(i, j))
                .map(|j| labels[j])
                .min()
                .unwrap_or(-1);
        }
    }
    labels
}

/// A few Gaussian blobs plus uniform background in the unit square.
pub fn blob_points(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed);
    let centres: Vec<[f64; 2]> = (0..4).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
    (0..n)
        .map(|i| {
            if i % 5 == 0 {
                vec![rng.random::<f64>(), rng.random::<f64>()]
            } else {
                let c = centres[rng.random_range(0..centres.len())];
                vec![c[0] + 0.05 * (rng.random::<f64>() - 0.5), c[1] + 0.05 * (rng.random::<f64>() - 0.5)]
            }
        })
        .collect()
}

pub fn uniform_points(count: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed);
    (0..count).map(|_| (0..d).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()).collect()
}
