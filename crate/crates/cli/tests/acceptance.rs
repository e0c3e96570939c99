//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any check fails.
//!
//! The trend checks run on the images in `$LUMEN_CORPUS` when it is set,
//! otherwise on a deterministic synthetic corpus.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lumen::clahe::{clahe, ClaheParams};
use lumen::filters::{frost, median, FrostParams};
use lumen::hvs::{recombine, segment_image, HvsCoefficients};
use lumen::metrics::{ambe, cii, psnr};
use lumen::mhe::threshold_matrix;
use lumen::pipeline::{mclahefrost_stages, MergeWeights};
use lumen::{Histogram, MethodId, PipelineConfig, Raster};
use lumen_cli::bench::{
    corpus_files, run_benchmark, BenchmarkTable, Metric, ReportFormat, RunManifest,
};
use lumen_cli::config::RunConfig;
use lumen_cli::io::{encode_pgm, load_image, save_image, Image};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_raster(rng: &mut StdRng, w: usize, h: usize) -> Raster {
    // Mix of uniform noise and a few-level image so both dense and sparse
    // histograms show up.
    let levels: Vec<u8> = (0..rng.random_range(2..6)).map(|_| rng.random()).collect();
    let sparse = rng.random_bool(0.3);
    let data = (0..w * h)
        .map(|_| {
            if sparse {
                levels[rng.random_range(0..levels.len())]
            } else {
                rng.random()
            }
        })
        .collect();
    Raster::new(w, h, data).unwrap()
}

// ---------------------------------------------------------------- 1

/// Within-class cost of a group of occupied levels, two-pass.
fn group_cost(levels: &[(usize, f64)]) -> f64 {
    let mass: f64 = levels.iter().map(|&(_, p)| p).sum();
    if mass == 0.0 {
        return 0.0;
    }
    let mean = levels.iter().map(|&(l, p)| l as f64 * p).sum::<f64>() / mass;
    levels
        .iter()
        .map(|&(l, p)| p * (l as f64 - mean).powi(2))
        .sum()
}

/// Can thresholds `t_1 < .. < t_{k-1} < 255` realize these class sizes over
/// the occupied levels (classes are `[t_{j-1}+1, t_j]`, never empty ranges)?
fn feasible(occupied: &[usize], sizes: &[usize]) -> bool {
    let k = sizes.len();
    let mut prev: i64 = -1;
    let mut taken = 0;
    for (j, &s) in sizes.iter().enumerate().take(k - 1) {
        taken += s;
        let last_in = if taken > 0 {
            occupied[taken - 1] as i64
        } else {
            -1
        };
        let t = (prev + 1).max(last_in);
        let first_after = occupied.get(taken).map_or(256, |&l| l as i64);
        if t >= first_after || t > 254 - (k - 2 - j) as i64 {
            return false;
        }
        prev = t;
    }
    true
}

fn exhaustive(occupied: &[(usize, f64)], k: usize) -> f64 {
    let levels: Vec<usize> = occupied.iter().map(|&(l, _)| l).collect();
    let m = occupied.len();
    let mut best = f64::INFINITY;
    let mut sizes = vec![0usize; k];
    // Enumerate compositions of m into k non-negative parts.
    fn rec(
        j: usize,
        left: usize,
        sizes: &mut Vec<usize>,
        occupied: &[(usize, f64)],
        levels: &[usize],
        best: &mut f64,
    ) {
        let k = sizes.len();
        if j == k - 1 {
            sizes[j] = left;
            if feasible(levels, sizes) {
                let mut start = 0;
                let mut cost = 0.0;
                for &s in sizes.iter() {
                    cost += group_cost(&occupied[start..start + s]);
                    start += s;
                }
                *best = best.min(cost);
            }
            return;
        }
        for s in 0..=left {
            sizes[j] = s;
            rec(j + 1, left - s, sizes, occupied, levels, best);
        }
    }
    rec(0, m, &mut sizes, occupied, &levels, &mut best);
    best
}

fn dp_vs_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for i in 0..200 {
        let m = rng.random_range(1..=16);
        let mut bins = [0u64; 256];
        // Every fourth histogram packs its levels tightly to exercise
        // adjacent occupied levels.
        let (lo, hi) = if i % 4 == 0 { (0, 32) } else { (0, 255) };
        let mut placed = 0;
        while placed < m {
            let l = rng.random_range(lo..=hi);
            if bins[l] == 0 {
                bins[l] = rng.random_range(1..1000);
                placed += 1;
            }
        }
        let hist = Histogram::from_bins(bins).unwrap();
        let total = hist.total() as f64;
        let occupied: Vec<(usize, f64)> = (0..256)
            .filter(|&l| bins[l] > 0)
            .map(|l| (l, bins[l] as f64 / total))
            .collect();
        let tm = threshold_matrix(&hist, 4).unwrap();
        for k in 2..=4 {
            let want = exhaustive(&occupied, k);
            let got = tm.disc(k);
            let err = (want - got).abs();
            worst = worst.max(err);
            if err > 1e-9 {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(10),
        format!(
            "600 cases, {mismatches} mismatches, max |err| {worst:.2e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------- 2

fn classical_he(img: &Raster) -> Raster {
    let mut bins = [0u64; 256];
    for &v in img.data() {
        bins[v as usize] += 1;
    }
    let n = img.len() as u64;
    let mut lut = [0u8; 256];
    let mut cum = 0u64;
    for v in 0..256 {
        cum += bins[v];
        lut[v] = ((2 * 255 * cum + n) / (2 * n)) as u8;
    }
    img.map_lut(&lut)
}

fn single_tile_clahe_is_he() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let p = ClaheParams {
        tile_width: 64,
        tile_height: 64,
        clip_limit: f64::INFINITY,
    };
    let mut bad = 0;
    for _ in 0..50 {
        let img = random_raster(&mut rng, 64, 64);
        if clahe(&img, &p).unwrap() != classical_he(&img) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("50 images, {bad} differ"))
}

// ---------------------------------------------------------------- 3

fn metric_oracles() -> Outcome {
    let a = Raster::from_fn(16, 16, |x, y| (x * 7 + y * 3 + 10) as u8).unwrap();
    let b = Raster::new(16, 16, a.data().iter().map(|&v| v + 1).collect()).unwrap();
    let p = psnr(&a, &b).unwrap();
    let psnr_ok = (p - 48.1308).abs() < 1e-3
        && psnr(&a, &a).unwrap() == f64::INFINITY
        && psnr(
            &Raster::filled(4, 4, 0).unwrap(),
            &Raster::filled(4, 4, 255).unwrap(),
        )
        .unwrap()
            == 0.0;

    let m100 = Raster::new(2, 1, vec![90, 110]).unwrap();
    let m90 = Raster::new(2, 1, vec![85, 95]).unwrap();
    let ambe_ok = ambe(&m100, &m90).unwrap() == 10.0
        && ambe(
            &Raster::filled(3, 3, 50).unwrap(),
            &Raster::filled(3, 3, 55).unwrap(),
        )
        .unwrap()
            == 5.0
        && ambe(&a, &a).unwrap() == 0.0;

    let board = |lo: u8, hi: u8| {
        Raster::from_fn(8, 8, |x, y| if (x + y) % 2 == 0 { lo } else { hi }).unwrap()
    };
    let c = cii(&board(100, 150), &board(0, 250)).unwrap();
    let cii_ok = (c - 5.0).abs() < 1e-9 && cii(&a, &a).unwrap() == 1.0;

    outcome(
        psnr_ok && ambe_ok && cii_ok,
        format!("psnr {p:.4} dB, checkerboard cii {c}, ambe exact {ambe_ok}"),
    )
}

// ---------------------------------------------------------------- 4

fn partition_invariant() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut bad = 0;
    let mut checked = 0;
    for i in 0..500 {
        let (w, h) = (rng.random_range(1..48), rng.random_range(1..48));
        let mut img = random_raster(&mut rng, w, h);
        if img.is_constant() {
            let mut d = img.data().to_vec();
            d[0] = d[0].wrapping_add(1);
            img = Raster::new(w, h, d).unwrap();
            if img.is_constant() {
                continue;
            }
        }
        // Alternate between the defaults and random coefficients so every
        // region gets populated somewhere.
        let coeffs = if i % 2 == 0 {
            HvsCoefficients::default()
        } else {
            let a1 = rng.random_range(0.0..0.5);
            let a2 = a1 + rng.random_range(0.0..0.5);
            HvsCoefficients {
                alpha1: a1,
                alpha2: a2,
                alpha3: a2 + rng.random_range(0.0..0.5),
                beta: rng.random_range(-5.0..5.0),
            }
        };
        let (_, seg) = segment_image(&img, coeffs).unwrap();
        checked += 1;
        let masks = seg.masks();
        let partition = (0..img.len()).all(|p| masks.iter().filter(|m| m.bits()[p]).count() == 1);
        let back = recombine(&seg, [&img, &img, &img], &img).unwrap();
        if !partition || back != img {
            bad += 1;
        }
    }
    outcome(
        bad == 0 && checked == 500,
        format!("{checked} images, {bad} violations"),
    )
}

// ---------------------------------------------------------------- 5

fn window_bounds(img: &Raster, x: usize, y: usize, r: usize) -> (u8, u8) {
    let (mut lo, mut hi) = (255u8, 0u8);
    for dy in -(r as isize)..=r as isize {
        for dx in -(r as isize)..=r as isize {
            let v = img.get_clamped(x as isize + dx, y as isize + dy);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}

fn filter_fixed_points() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut bad_const = 0;
    for v in [0u8, 1, 77, 128, 255] {
        let img = Raster::filled(9, 7, v).unwrap();
        for n in [3, 5, 7] {
            let p = FrostParams {
                size: n,
                damping_scale: 1.0,
            };
            if frost(&img, &p).unwrap() != img || median(&img, n).unwrap() != img {
                bad_const += 1;
            }
        }
    }
    let mut bad_range = 0;
    for i in 0..100 {
        let (w, h) = (rng.random_range(1..40), rng.random_range(1..40));
        let img = random_raster(&mut rng, w, h);
        let n = [3, 5, 7][i % 3];
        let out = frost(
            &img,
            &FrostParams {
                size: n,
                damping_scale: rng.random_range(0.1..4.0),
            },
        )
        .unwrap();
        'px: for y in 0..h {
            for x in 0..w {
                let (lo, hi) = window_bounds(&img, x, y, n / 2);
                let v = out.get(x, y);
                if v < lo || v > hi {
                    bad_range += 1;
                    break 'px;
                }
            }
        }
    }
    outcome(
        bad_const == 0 && bad_range == 0,
        format!("constant images changed: {bad_const}; range violations: {bad_range}/100"),
    )
}

// ---------------------------------------------------------------- 6

fn entropy_of(img: &Raster) -> f64 {
    let mut bins = [0u64; 256];
    for &v in img.data() {
        bins[v as usize] += 1;
    }
    let n = img.len() as f64;
    bins.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log10()
        })
        .sum()
}

fn entropy_weight_ordering() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let cfg = PipelineConfig {
        merge: lumen::pipeline::MergeConfig {
            weights: MergeWeights::Entropy,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut bad = 0;
    for _ in 0..100 {
        let (w, h) = (rng.random_range(16..64), rng.random_range(16..64));
        let img = random_raster(&mut rng, w, h);
        let st = mclahefrost_stages(&img, &cfg).unwrap();
        let ex = entropy_of(&img);
        let d: Vec<f64> = st
            .filtered
            .iter()
            .map(|l| (entropy_of(l) - ex).abs())
            .collect();
        let dmax = d.iter().cloned().fold(f64::MIN, f64::max);
        let wmax = st.weights.iter().cloned().fold(f64::MIN, f64::max);
        let sums_to_one = (st.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9;
        // Every layer tied for the largest entropy gap must carry the
        // largest weight.
        let ok = sums_to_one
            && (0..3)
                .filter(|&i| dmax - d[i] <= 1e-12)
                .all(|i| (wmax - st.weights[i]).abs() <= 1e-12);
        if !ok {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("100 images, {bad} misordered"))
}

// ---------------------------------------------------------------- 7, 8

/// Smooth illumination, soft blobs, hard-edged objects, a striped patch, a
/// shadowed area and fine noise, followed by a per-image tone curve.
fn synthetic_scene(seed: u64) -> Raster {
    let mut rng = StdRng::seed_from_u64(1000 + seed);
    let (w, h) = (256usize, 256usize);
    let base = rng.random_range(40.0..170.0);
    let (gx, gy) = (rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0));
    let mut f: Vec<f64> = (0..w * h)
        .map(|i| {
            base + gx * ((i % w) as f64 / w as f64 - 0.5) + gy * ((i / w) as f64 / h as f64 - 0.5)
        })
        .collect();

    for _ in 0..rng.random_range(6..12) {
        let (cx, cy) = (
            rng.random_range(0.0..w as f64),
            rng.random_range(0.0..h as f64),
        );
        let s = rng.random_range(8.0..40.0);
        let a = rng.random_range(-80.0..80.0);
        for (i, v) in f.iter_mut().enumerate() {
            let (dx, dy) = ((i % w) as f64 - cx, (i / w) as f64 - cy);
            *v += a * (-(dx * dx + dy * dy) / (2.0 * s * s)).exp();
        }
    }
    for _ in 0..rng.random_range(2..6) {
        let (x0, y0) = (rng.random_range(0..w - 20), rng.random_range(0..h - 20));
        let (rw, rh) = (rng.random_range(10..80), rng.random_range(10..80));
        let a = rng.random_range(-50.0..50.0);
        for y in y0..(y0 + rh).min(h) {
            for x in x0..(x0 + rw).min(w) {
                f[y * w + x] += a;
            }
        }
    }
    let (sx, sy) = (rng.random_range(0..w / 2), rng.random_range(0..h / 2));
    let (period, amp) = (rng.random_range(3.0..12.0), rng.random_range(8.0..30.0));
    for y in sy..sy + h / 3 {
        for x in sx..sx + w / 3 {
            f[y * w + x] += amp * (x as f64 * std::f64::consts::TAU / period).sin();
        }
    }
    // A textured shadow: natural scenes nearly always have dark detail.
    let (hx, hy) = (rng.random_range(0..w / 2), rng.random_range(0..h / 2));
    let depth = rng.random_range(0.1..0.3);
    for y in hy..hy + h / 2 {
        for x in hx..hx + w / 2 {
            let v = &mut f[y * w + x];
            *v = depth * *v + 6.0 * ((x * 3 + y * 5) as f64 * 0.9).sin();
        }
    }
    let noise = rng.random_range(1.0..6.0);
    for v in f.iter_mut() {
        *v += noise * (rng.random::<f64>() + rng.random::<f64>() - 1.0);
    }

    let gamma = [1.0, 1.6, 0.7, 1.0, 2.2, 1.0, 0.8, 1.3, 1.0, 0.6][seed as usize % 10];
    let squeeze = if seed % 3 == 1 { 0.5 } else { 1.0 };
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    let data = f
        .iter()
        .map(|&v| {
            let v = (mean + squeeze * (v - mean)).clamp(0.0, 255.0);
            (255.0 * (v / 255.0).powf(gamma)).round() as u8
        })
        .collect();
    Raster::new(w, h, data).unwrap()
}

struct Corpus {
    dir: PathBuf,
    label: String,
    _tmp: Option<tempfile::TempDir>,
}

fn corpus() -> Corpus {
    if let Some(dir) = std::env::var_os("LUMEN_CORPUS") {
        let dir = PathBuf::from(dir);
        return Corpus {
            label: format!("corpus {}", dir.display()),
            dir,
            _tmp: None,
        };
    }
    let tmp = tempfile::tempdir().unwrap();
    for i in 0..10 {
        std::fs::write(
            tmp.path().join(format!("scene{i:02}.pgm")),
            encode_pgm(&synthetic_scene(i)),
        )
        .unwrap();
    }
    Corpus {
        dir: tmp.path().to_path_buf(),
        label: "synthetic corpus (set LUMEN_CORPUS for real images)".into(),
        _tmp: Some(tmp),
    }
}

fn bench(corpus_dir: &Path, methods: &[MethodId], out: &Path) -> (Vec<BenchmarkTable>, Duration) {
    let manifest = RunManifest {
        corpus_dir: corpus_dir.to_path_buf(),
        methods: methods.to_vec(),
        config: RunConfig::default(),
        output_dir: out.to_path_buf(),
        format: ReportFormat::Csv,
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let start = Instant::now();
    let result = run_benchmark(&manifest, jobs).unwrap();
    (result.tables, start.elapsed())
}

fn table(tables: &[BenchmarkTable], m: Metric) -> &BenchmarkTable {
    tables.iter().find(|t| t.metric == m).unwrap()
}

/// Images for which `ordered` holds on the values of `methods`.
fn count_ordered(
    t: &BenchmarkTable,
    images: &[String],
    methods: &[MethodId],
    ordered: impl Fn(&[f64]) -> bool,
) -> usize {
    images
        .iter()
        .filter(|img| {
            let v: Option<Vec<f64>> = methods.iter().map(|&m| t.value(img, m)).collect();
            v.is_some_and(|v| ordered(&v))
        })
        .count()
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn names(dir: &Path) -> Vec<String> {
    corpus_files(dir)
        .unwrap()
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect()
}

fn need(fraction_num: usize, fraction_den: usize, n: usize) -> usize {
    (fraction_num * n).div_ceil(fraction_den)
}

fn trend_checks(c: &Corpus) -> (Outcome, Outcome) {
    use MethodId::*;
    let all = names(&c.dir);
    let standard: Vec<String> = if c._tmp.is_some() {
        all[..7].to_vec()
    } else {
        all.clone()
    };
    let out = tempfile::tempdir().unwrap();

    let hvs_family = [MclaheFrost, HvsEdbi, HvsEdge, Hvs];
    let std_dir = tempfile::tempdir().unwrap();
    for name in &standard {
        std::fs::copy(c.dir.join(name), std_dir.path().join(name)).unwrap();
    }
    let (tables, elapsed) = bench(std_dir.path(), &hvs_family, &out.path().join("trend"));
    let n = standard.len();
    for t in &tables {
        eprint!("{} table\n{}", t.metric.name(), t.to_csv());
    }

    let ambe_ok = count_ordered(
        table(&tables, Metric::Ambe),
        &standard,
        &hvs_family,
        strictly_increasing,
    );
    let psnr_ok = count_ordered(table(&tables, Metric::Psnr), &standard, &hvs_family, |v| {
        v.windows(2).all(|w| w[0] > w[1])
    });
    let need7 = need(5, 7, n);
    let t7 = outcome(
        ambe_ok >= need7 && psnr_ok >= need7 && elapsed < Duration::from_secs(120),
        format!(
            "{}: AMBE order on {ambe_ok}/{n}, PSNR order on {psnr_ok}/{n} (need {need7}), {:.1}s",
            c.label,
            elapsed.as_secs_f64()
        ),
    );

    let cii_order = [Hvs, HvsEdge, HvsEdbi];
    let cii_ok = count_ordered(table(&tables, Metric::Cii), &standard, &cii_order, |v| {
        v[0] >= 1.0 && strictly_increasing(v)
    });

    let variants = [MclaheMhe, MclaheEdbi, MclaheAlrs];
    let (vt, _) = bench(&c.dir, &variants, &out.path().join("variants"));
    let ct = table(&vt, Metric::Cii);
    eprint!("CII table\n{}", ct.to_csv());
    let alrs_top = count_ordered(ct, &all, &variants, |v| v[2] > v[0] && v[2] > v[1]);
    let (need8a, need8b) = (need(5, 7, n), need(7, 10, all.len()));
    let t8 = outcome(
        cii_ok >= need8a && alrs_top >= need8b,
        format!(
            "{}: 1<=HVS<HVSedge<HVSEDBI CII order on {cii_ok}/{n} (need {need8a}), MCLAHEALRS top on {alrs_top}/{} (need {need8b})",
            c.label,
            all.len()
        ),
    );
    (t7, t8)
}

// ---------------------------------------------------------------- 9

fn jobs_determinism() -> Outcome {
    let corpus = tempfile::tempdir().unwrap();
    for i in 0..4 {
        let img = synthetic_scene(20 + i);
        std::fs::write(corpus.path().join(format!("g{i}.pgm")), encode_pgm(&img)).unwrap();
    }
    let rgb = Image::Rgb([
        synthetic_scene(30),
        synthetic_scene(31),
        synthetic_scene(32),
    ]);
    save_image(&rgb, &corpus.path().join("c0.png")).unwrap();

    let out = tempfile::tempdir().unwrap();
    let methods = "HVS,HVSedge,HVSEDBI,MCLAHEFROST,MCLAHEMHE,MCLAHEEDBI,MCLAHEALRS,HE,CLAHE";
    let run = |jobs: &str, format: &str| -> PathBuf {
        let dir = out.path().join(format!("{format}-{jobs}"));
        let status = Command::new(env!("CARGO_BIN_EXE_lumen"))
            .args(["benchmark", "--corpus"])
            .arg(corpus.path())
            .arg("--out")
            .arg(&dir)
            .args(["--methods", methods, "--format", format, "--jobs", jobs])
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        dir
    };
    let mut compared = 0;
    let mut differing = Vec::new();
    for format in ["csv", "json"] {
        let (a, b) = (run("1", format), run("8", format));
        for rel in tree(&a) {
            compared += 1;
            if std::fs::read(a.join(&rel)).ok() != std::fs::read(b.join(&rel)).ok() {
                differing.push(rel.display().to_string());
            }
        }
        if tree(&a) != tree(&b) {
            differing.push(format!("{format}: file sets differ"));
        }
    }
    outcome(
        differing.is_empty() && compared > 0,
        format!("{compared} files compared, differing: {differing:?}"),
    )
}

fn tree(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------- 10

fn io_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let dir = tempfile::tempdir().unwrap();
    let mut bad = 0;
    for i in 0..50 {
        let (w, h) = (rng.random_range(1..80), rng.random_range(1..80));
        let gray = Image::Gray(random_raster(&mut rng, w, h));
        let rgb = Image::Rgb([
            random_raster(&mut rng, w, h),
            random_raster(&mut rng, w, h),
            random_raster(&mut rng, w, h),
        ]);
        for (img, ext) in [(&gray, "pgm"), (&gray, "png"), (&rgb, "png")] {
            let path = dir.path().join(format!("{i}.{ext}"));
            save_image(img, &path).unwrap();
            if &load_image(&path).unwrap() != img {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("150 round trips (PGM, gray PNG, RGB PNG), {bad} differ"),
    )
}

fn main() {
    let c = corpus();
    let (t7, t8) = trend_checks(&c);
    let results = [
        ("1 dp-vs-exhaustive", dp_vs_exhaustive()),
        ("2 clahe-single-tile-is-he", single_tile_clahe_is_he()),
        ("3 metric-oracles", metric_oracles()),
        ("4 hvs-partition", partition_invariant()),
        ("5 filter-fixed-points", filter_fixed_points()),
        ("6 entropy-weight-ordering", entropy_weight_ordering()),
        ("7 ambe-psnr-trend", t7),
        ("8 cii-trend", t8),
        ("9 jobs-determinism", jobs_determinism()),
        ("10 io-round-trip", io_round_trip()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "[{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
