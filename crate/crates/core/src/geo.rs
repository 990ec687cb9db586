//! Weather-station graphs: great-circle distances, kNN edges and the
//! symmetrically normalized Gaussian kernel.
//!
//! Distances live on the unit sphere (radians). Multiplying by an earth radius
//! (e.g. 6,357 km) would only rescale σ², so it is never applied.

use std::io::Read;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::transform::format_f64;
use crate::{Error, Execution, Result};

use std::f64::consts::{FRAC_PI_2, PI};

/// A station position in radians: `theta` is latitude, `phi` longitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationCoord {
    id: String,
    theta: f64,
    phi: f64,
}

impl StationCoord {
    pub fn new(id: impl Into<String>, theta: f64, phi: f64) -> Result<Self> {
        let id = id.into();
        if !theta.is_finite() || !(-FRAC_PI_2..=FRAC_PI_2).contains(&theta) {
            return Err(Error::param(format!("station {id}: latitude {theta} rad outside [-pi/2, pi/2]")));
        }
        if !phi.is_finite() || !(-PI..=PI).contains(&phi) {
            return Err(Error::param(format!("station {id}: longitude {phi} rad outside [-pi, pi]")));
        }
        Ok(StationCoord { id, theta, phi })
    }

    pub fn from_degrees(id: impl Into<String>, lat_deg: f64, lon_deg: f64) -> Result<Self> {
        StationCoord::new(id, lat_deg.to_radians(), lon_deg.to_radians())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Great-circle distance on the unit sphere.
///
/// `arccos(cos θ1 cos θ2 cos(φ1 − φ2) + sin θ1 sin θ2)` with the argument
/// clamped to [−1, 1]. Identical coordinates return exactly 0 (the formula
/// alone can leave `cos²θ + sin²θ` a rounding error below 1).
pub fn spherical_distance(a: &StationCoord, b: &StationCoord) -> f64 {
    if a.theta == b.theta && a.phi == b.phi {
        return 0.0;
    }
    let c = a.theta.cos() * b.theta.cos() * (a.phi - b.phi).cos() + a.theta.sin() * b.theta.sin();
    c.clamp(-1.0, 1.0).acos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnConfig {
    pub k: usize,
    /// Kernel bandwidth; `None` uses the mean squared kNN edge distance.
    pub sigma2: Option<f64>,
    /// Keep only mutual neighbors instead of the union.
    pub mutual: bool,
}

impl KnnConfig {
    pub fn new(k: usize) -> Self {
        KnnConfig { k, sigma2: None, mutual: false }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k >= n {
            return Err(Error::param(format!("k = {} must satisfy 1 <= k < {n} stations", self.k)));
        }
        if let Some(s) = self.sigma2 {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::param(format!("sigma2 = {s} must be positive")));
            }
        }
        Ok(())
    }
}

/// One undirected kNN edge, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnEdge {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

/// All pairwise distances. Rows are evaluated in parallel when enabled.
pub fn pairwise_distances(stations: &[StationCoord], exec: Execution) -> Array2<f64> {
    let n = stations.len();
    let rows = exec.map_range(n, |i| stations.iter().map(|s| spherical_distance(&stations[i], s)).collect::<Vec<_>>());
    let mut d = Array2::zeros((n, n));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            d[[i, j]] = v;
        }
    }
    d
}

/// kNN edges with the union rule (or mutual rule when `mutual`), sorted by `(i, j)`.
pub fn knn_edges(stations: &[StationCoord], k: usize, mutual: bool) -> Result<Vec<KnnEdge>> {
    knn_edges_with(stations, k, mutual, Execution::default())
}

pub fn knn_edges_with(stations: &[StationCoord], k: usize, mutual: bool, exec: Execution) -> Result<Vec<KnnEdge>> {
    let n = stations.len();
    KnnConfig { k, sigma2: None, mutual }.validate(n)?;
    let d = pairwise_distances(stations, exec);
    for i in 0..n {
        for j in (i + 1)..n {
            if d[[i, j]] == 0.0 {
                return Err(Error::AmbiguousNeighbor { first: i, second: j });
            }
        }
    }
    let neighbors = exec.map_range(n, |i| {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| d[[i, a]].total_cmp(&d[[i, b]]).then(a.cmp(&b)));
        order.truncate(k);
        order
    });
    let mut is_nb = Array2::from_elem((n, n), false);
    for (i, nb) in neighbors.iter().enumerate() {
        for &j in nb {
            is_nb[[i, j]] = true;
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let keep = if mutual { is_nb[[i, j]] && is_nb[[j, i]] } else { is_nb[[i, j]] || is_nb[[j, i]] };
            if keep {
                edges.push(KnnEdge { i, j, distance: d[[i, j]] });
            }
        }
    }
    Ok(edges)
}

/// Mean squared edge distance, the default kernel bandwidth.
pub fn default_sigma2(edges: &[KnnEdge]) -> Result<f64> {
    if edges.is_empty() {
        return Err(Error::param("cannot derive sigma2 from an empty edge set"));
    }
    let s = edges.iter().map(|e| e.distance * e.distance).sum::<f64>() / edges.len() as f64;
    if s > 0.0 {
        Ok(s)
    } else {
        Err(Error::param("all edge distances are zero; sigma2 must be given explicitly"))
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Normalized Gaussian weights
/// `W_ij = e^{-d_ij²/σ²} / (sqrt(Σ_{k~i} e^{-d_ik²/σ²}) · sqrt(Σ_{k~j} e^{-d_jk²/σ²}))`,
/// evaluated in the log domain so far-apart stations do not underflow the sums.
pub fn gaussian_weights(n: usize, edges: &[KnnEdge], sigma2: f64) -> Result<Graph> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::param(format!("sigma2 = {sigma2} must be positive")));
    }
    let mut incident: Vec<Vec<f64>> = vec![Vec::new(); n];
    for e in edges {
        if e.i >= n || e.j >= n || e.i == e.j {
            return Err(Error::param(format!("invalid edge ({}, {}) for {n} nodes", e.i, e.j)));
        }
        let x = -(e.distance * e.distance) / sigma2;
        incident[e.i].push(x);
        incident[e.j].push(x);
    }
    if let Some(isolated) = incident.iter().position(Vec::is_empty) {
        return Err(Error::DegenerateNormalization(isolated));
    }
    let log_norm: Vec<f64> = incident.iter().map(|xs| log_sum_exp(xs)).collect();
    let mut triples = Vec::with_capacity(edges.len());
    for e in edges {
        let x = -(e.distance * e.distance) / sigma2;
        let w = (x - 0.5 * log_norm[e.i] - 0.5 * log_norm[e.j]).exp().min(1.0);
        if w <= 0.0 {
            return Err(Error::Numerical {
                message: format!("weight of edge ({}, {}) underflowed to zero", e.i, e.j),
                residual: None,
            });
        }
        triples.push((e.i, e.j, w));
    }
    Graph::from_edges(n, false, &triples)
}

/// kNN edges followed by Gaussian weighting.
pub fn build_station_graph(stations: &[StationCoord], cfg: &KnnConfig) -> Result<Graph> {
    cfg.validate(stations.len())?;
    let edges = knn_edges(stations, cfg.k, cfg.mutual)?;
    let sigma2 = match cfg.sigma2 {
        Some(s) => s,
        None => default_sigma2(&edges)?,
    };
    gaussian_weights(stations.len(), &edges, sigma2)
}

#[derive(Deserialize)]
struct StationRow {
    id: String,
    lat_deg: f64,
    lon_deg: f64,
}

/// Reads an `id,lat_deg,lon_deg` station list.
pub fn read_stations_csv<R: Read>(reader: R) -> Result<Vec<StationCoord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (k, row) in rdr.deserialize::<StationRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse { line: k + 2, message: e.to_string() })?;
        out.push(StationCoord::from_degrees(row.id, row.lat_deg, row.lon_deg)?);
    }
    if out.is_empty() {
        return Err(Error::Parse { line: 1, message: "station list is empty".into() });
    }
    Ok(out)
}

/// Writes an `id,lat_deg,lon_deg` station list.
pub fn write_stations_csv<W: std::io::Write>(writer: W, stations: &[StationCoord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "lat_deg", "lon_deg"])?;
    for s in stations {
        w.write_record([s.id.clone(), format_f64(s.theta.to_degrees()), format_f64(s.phi.to_degrees())])?;
    }
    w.flush().map_err(|e| Error::io("<stations output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn st(theta: f64, phi: f64) -> StationCoord {
        StationCoord::new("s", theta, phi).unwrap()
    }

    fn equator(n: usize) -> Vec<StationCoord> {
        (0..n).map(|i| StationCoord::new(format!("e{i}"), 0.0, -PI + 2.0 * PI * i as f64 / n as f64).unwrap()).collect()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(spherical_distance(&st(0.3, 1.1), &st(0.3, 1.1)), 0.0);
        assert!((spherical_distance(&st(0.0, 0.0), &st(0.0, FRAC_PI_2)) - FRAC_PI_2).abs() < 1e-15);
        assert!((spherical_distance(&st(FRAC_PI_4, 0.0), &st(-FRAC_PI_4, PI)) - PI).abs() < 1e-7);
    }

    #[test]
    fn coordinate_validation() {
        assert!(StationCoord::new("x", 1.6, 0.0).is_err());
        assert!(StationCoord::new("x", 0.0, -3.2).is_err());
        assert!(StationCoord::new("x", f64::NAN, 0.0).is_err());
        assert!(StationCoord::from_degrees("x", -90.0, 180.0).is_ok());
    }

    #[test]
    fn three_equator_stations_k1() {
        // Longitudes 0, 0.1, 0.3: 0<->1 mutual nearest, 2's nearest is 1.
        let s = vec![st(0.0, 0.0), st(0.0, 0.1), st(0.0, 0.3)];
        let e = knn_edges(&s, 1, false).unwrap();
        let pairs: Vec<_> = e.iter().map(|e| (e.i, e.j)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
        let m = knn_edges(&s, 1, true).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn complete_graph_when_k_is_n_minus_1() {
        let s = equator(5);
        assert_eq!(knn_edges(&s, 4, false).unwrap().len(), 10);
        assert!(knn_edges(&s, 5, false).is_err());
        assert!(knn_edges(&s, 0, false).is_err());
    }

    #[test]
    fn duplicate_coordinates_are_ambiguous() {
        let s = vec![st(0.1, 0.2), st(0.5, 0.5), st(0.1, 0.2)];
        assert!(matches!(knn_edges(&s, 1, false), Err(Error::AmbiguousNeighbor { first: 0, second: 2 })));
    }

    #[test]
    fn single_edge_weight_is_exactly_one() {
        for d in [1e-3, 0.4, 2.5, 30.0] {
            let g = gaussian_weights(2, &[KnnEdge { i: 0, j: 1, distance: d }], 0.01).unwrap();
            assert_eq!(g.weights()[[0, 1]], 1.0);
        }
    }

    #[test]
    fn star_weight_is_inverse_sqrt_two() {
        let d = 0.37;
        let edges = [KnnEdge { i: 0, j: 1, distance: d }, KnnEdge { i: 0, j: 2, distance: d }];
        let g = gaussian_weights(3, &edges, 0.2).unwrap();
        let a = (-d * d / 0.2_f64).exp();
        let hand = a / ((2.0 * a).sqrt() * a.sqrt());
        assert!((g.weights()[[0, 1]] - hand).abs() < 1e-12);
        assert!((g.weights()[[0, 2]] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn far_edge_weight_vanishes() {
        let edges = [KnnEdge { i: 0, j: 1, distance: 0.1 }, KnnEdge { i: 0, j: 2, distance: 1.0 }];
        let g = gaussian_weights(3, &edges, 0.01).unwrap();
        assert!(g.weights()[[0, 2]] < 1e-20);
        assert!(g.weights()[[0, 1]] > 0.99);
    }

    #[test]
    fn isolated_node_is_degenerate() {
        let edges = [KnnEdge { i: 0, j: 1, distance: 0.1 }];
        assert!(matches!(gaussian_weights(3, &edges, 1.0), Err(Error::DegenerateNormalization(2))));
    }

    #[test]
    fn station_graph_examples() {
        let two = vec![st(0.0, 0.0), st(0.2, 0.3)];
        let g = build_station_graph(&two, &KnnConfig::new(1)).unwrap();
        assert_eq!(g.edges(), vec![(0, 1, 1.0)]);

        let ring = build_station_graph(&equator(6), &KnnConfig::new(2)).unwrap();
        // Each station's two nearest are its ring neighbors, so k = 2 gives C6.
        assert_eq!(ring.edge_count(), 6);
        let w: Vec<f64> = ring.edges().iter().map(|e| e.2).collect();
        assert!(w.iter().all(|x| (x - w[0]).abs() < 1e-12 && *x > 0.0 && *x <= 1.0));
        assert!((w[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let s: Vec<_> = (0..20).map(|i| st(0.05 * i as f64 - 0.5, 0.13 * i as f64 - 1.2)).collect();
        let a = knn_edges_with(&s, 3, false, Execution::Sequential).unwrap();
        let b = knn_edges_with(&s, 3, false, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn station_csv_round_trip() {
        let text = "id,lat_deg,lon_deg\nA, 40.5,-73.9\nB,51.5,0.0\n";
        let s = read_stations_csv(text.as_bytes()).unwrap();
        assert_eq!(s[0].id(), "A");
        assert!((s[0].theta() - 40.5_f64.to_radians()).abs() < 1e-15);
        let mut buf = Vec::new();
        write_stations_csv(&mut buf, &s).unwrap();
        let back = read_stations_csv(buf.as_slice()).unwrap();
        for (a, b) in s.iter().zip(&back) {
            assert_eq!(a.id(), b.id());
            assert!((a.theta() - b.theta()).abs() < 1e-15 && (a.phi() - b.phi()).abs() < 1e-15);
        }
        assert!(matches!(read_stations_csv("id,lat_deg,lon_deg\nA,x,1\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
    }
}
