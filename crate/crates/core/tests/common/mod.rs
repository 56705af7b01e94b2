//! Brute-force reference implementations shared by the integration suites.
//! Nothing here calls into the search code of the library.

#![allow(dead_code)]

/// All set partitions of `items`, via restricted growth strings.
pub fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let n = items.len();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().unwrap() + 1;
        let mut p = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            p[b].push(items[i]);
        }
        out.push(p);
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            let prefix_max = rgs[..i].iter().max().copied().unwrap();
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for r in &mut rgs[i + 1..] {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Entropy by closed form. `name` is `shannon`, `renyi:A` or `tsallis:A`.
pub fn entropy(name: &str, masses: &[f64]) -> f64 {
    let positive = masses.iter().copied().filter(|&p| p > 0.0);
    if name == "shannon" {
        return positive.map(|p| -p * p.log2()).sum();
    }
    let (family, alpha) = name.split_once(':').unwrap();
    let alpha: f64 = alpha.parse().unwrap();
    let power: f64 = positive.map(|p| p.powf(alpha)).sum();
    match family {
        "renyi" => power.log2() / (1.0 - alpha),
        "tsallis" => (power - 1.0) / (1.0 - alpha),
        _ => panic!("unknown family {family}"),
    }
}

/// Smallest entropy over set partitions of the positive-mass atoms whose
/// blocks each fit in some cover set; `None` when the cover misses mass.
pub fn cover_entropy(name: &str, mu: &[f64], cover: &[Vec<usize>]) -> Option<f64> {
    let support: Vec<usize> = (0..mu.len()).filter(|&x| mu[x] > 0.0).collect();
    if support.iter().any(|x| !cover.iter().any(|s| s.contains(x))) {
        return None;
    }
    set_partitions(&support)
        .into_iter()
        .filter(|p| {
            p.iter()
                .all(|b| cover.iter().any(|s| b.iter().all(|x| s.contains(x))))
        })
        .map(|p| {
            let masses: Vec<f64> = p.iter().map(|b| b.iter().map(|&x| mu[x]).sum()).collect();
            entropy(name, &masses)
        })
        .min_by(f64::total_cmp)
}

pub const FUNCTIONALS: [&str; 6] = [
    "shannon",
    "renyi:0.5",
    "renyi:2",
    "tsallis:0.5",
    "tsallis:2",
    "tsallis:3",
];
