//! Hexagon-complex subsystems and the three-region partitions used for the
//! topological entanglement entropy.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::lattice::{Lattice, LatticeError};

/// A set of edges made of whole triangles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    /// Sorted edge (qubit) indices.
    pub edges: Vec<usize>,
    /// Sorted triangle indices.
    pub triangles: Vec<usize>,
    pub label: String,
}

impl Subsystem {
    /// Builds the subsystem spanned by `triangles`, edges included.
    pub fn from_triangles(lat: &Lattice, triangles: &BTreeSet<usize>, label: &str) -> Self {
        let edges: BTreeSet<usize> = triangles.iter().flat_map(|&t| lat.triangle_edges(t)).collect();
        Self {
            edges: edges.into_iter().collect(),
            triangles: triangles.iter().copied().collect(),
            label: label.to_string(),
        }
    }

    /// Area `A_h` in unit triangles.
    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Size label `L = sqrt(A_h)`.
    pub fn linear_size(&self) -> f64 {
        (self.n_triangles() as f64).sqrt()
    }
}

/// Union of the hexagons (six triangles around a vertex) centered at
/// `centers`. The resulting triangle set must be edge-connected.
pub fn hexagon_complex(lat: &Lattice, centers: &[(usize, usize)], label: &str) -> Result<Subsystem, LatticeError> {
    let tris = hexagon_triangles(lat, centers)?;
    if !triangles_connected(lat, &tris) {
        return Err(LatticeError::InvalidArgument(format!("hexagon complex {label:?} is disconnected")));
    }
    Ok(Subsystem::from_triangles(lat, &tris, label))
}

fn hexagon_triangles(lat: &Lattice, centers: &[(usize, usize)]) -> Result<BTreeSet<usize>, LatticeError> {
    if centers.is_empty() {
        return Err(LatticeError::InvalidArgument("no hexagon centers".into()));
    }
    let mut tris = BTreeSet::new();
    for &(x, y) in centers {
        if x >= lat.l_x() || y >= lat.l_y() {
            return Err(LatticeError::InvalidArgument(format!(
                "hexagon center ({x},{y}) outside {}x{} lattice",
                lat.l_x(),
                lat.l_y()
            )));
        }
        let s = lat.vertex_index(x as i64, y as i64);
        tris.extend(lat.vertex_triangles(s));
    }
    Ok(tris)
}

/// Edge-adjacency connectivity of a triangle set.
fn triangles_connected(lat: &Lattice, tris: &BTreeSet<usize>) -> bool {
    let Some(&start) = tris.iter().next() else {
        return false;
    };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for e in lat.triangle_edges(t) {
            for nb in lat.edge_triangles(e) {
                if tris.contains(&nb) && seen.insert(nb) {
                    queue.push_back(nb);
                }
            }
        }
    }
    seen.len() == tris.len()
}

/// Euler characteristic `V - E + F` of the closed complex of `tris`.
fn euler_characteristic(lat: &Lattice, tris: &BTreeSet<usize>) -> i64 {
    let verts: HashSet<usize> = tris.iter().flat_map(|&t| lat.triangle_vertices(t)).collect();
    let edges: HashSet<usize> = tris.iter().flat_map(|&t| lat.triangle_edges(t)).collect();
    verts.len() as i64 - edges.len() as i64 + tris.len() as i64
}

/// Three edge-disjoint regions `A`, `B`, `C` whose union is a disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KpRegions {
    pub a: Subsystem,
    pub b: Subsystem,
    pub c: Subsystem,
}

/// Hexagon centers of the three regions, before overlaps are resolved.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegionCenters {
    pub a: Vec<(usize, usize)>,
    pub b: Vec<(usize, usize)>,
    pub c: Vec<(usize, usize)>,
}

impl KpRegions {
    /// Builds the partition from hexagon centers. Triangles and edges shared
    /// by several regions go to the first one in `A < B < C` order.
    pub fn from_centers(lat: &Lattice, centers: &RegionCenters) -> Result<Self, LatticeError> {
        let raw = [
            hexagon_triangles(lat, &centers.a)?,
            hexagon_triangles(lat, &centers.b)?,
            hexagon_triangles(lat, &centers.c)?,
        ];
        let mut taken_tris = BTreeSet::new();
        let mut taken_edges = BTreeSet::new();
        let mut parts = Vec::with_capacity(3);
        for (tris, label) in raw.iter().zip(["A", "B", "C"]) {
            let own: BTreeSet<usize> = tris.difference(&taken_tris).copied().collect();
            taken_tris.extend(own.iter().copied());
            let mut sub = Subsystem::from_triangles(lat, &own, label);
            sub.edges.retain(|e| !taken_edges.contains(e));
            taken_edges.extend(sub.edges.iter().copied());
            parts.push(sub);
        }
        let c = parts.pop().expect("three regions");
        let b = parts.pop().expect("three regions");
        let a = parts.pop().expect("three regions");
        let regions = KpRegions { a, b, c };
        regions.validate(lat)?;
        Ok(regions)
    }

    /// Checks disjointness, connectivity, pairwise adjacency and that the
    /// union is simply connected (a connected complex with Euler
    /// characteristic 1, which excludes holes and non-contractible bands).
    pub fn validate(&self, lat: &Lattice) -> Result<(), LatticeError> {
        let geo = |m: String| Err(LatticeError::RegionGeometry(m));
        let regions = [&self.a, &self.b, &self.c];
        let tri_sets: Vec<BTreeSet<usize>> = regions.iter().map(|r| r.triangles.iter().copied().collect()).collect();
        for (r, set) in regions.iter().zip(&tri_sets) {
            if r.edges.is_empty() || set.is_empty() {
                return geo(format!("region {} is empty", r.label));
            }
            if !triangles_connected(lat, set) {
                return geo(format!("region {} is not connected", r.label));
            }
        }
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let ei: HashSet<_> = regions[i].edges.iter().collect();
            if regions[j].edges.iter().any(|e| ei.contains(e)) {
                return geo(format!("regions {} and {} share edges", regions[i].label, regions[j].label));
            }
            if !tri_sets[i].is_disjoint(&tri_sets[j]) {
                return geo(format!("regions {} and {} share triangles", regions[i].label, regions[j].label));
            }
            let union: BTreeSet<usize> = tri_sets[i].union(&tri_sets[j]).copied().collect();
            if !triangles_connected(lat, &union) {
                return geo(format!("regions {} and {} are not adjacent", regions[i].label, regions[j].label));
            }
        }
        let all: BTreeSet<usize> = tri_sets.iter().flatten().copied().collect();
        let chi = euler_characteristic(lat, &all);
        if chi != 1 {
            return geo(format!("union ABC is not simply connected (Euler characteristic {chi})"));
        }
        Ok(())
    }

    /// Edge sets of the seven unions entering the entropy combination, in the
    /// order `A, B, C, AB, BC, CA, ABC`.
    pub fn combinations(&self) -> [Vec<usize>; 7] {
        let join = |parts: &[&Subsystem]| -> Vec<usize> {
            let mut v: Vec<usize> = parts.iter().flat_map(|p| p.edges.iter().copied()).collect();
            v.sort_unstable();
            v
        };
        let (a, b, c) = (&self.a, &self.b, &self.c);
        [
            a.edges.clone(),
            b.edges.clone(),
            c.edges.clone(),
            join(&[a, b]),
            join(&[b, c]),
            join(&[c, a]),
            join(&[a, b, c]),
        ]
    }

    /// Total area of `ABC` in unit triangles.
    pub fn n_triangles(&self) -> usize {
        self.a.n_triangles() + self.b.n_triangles() + self.c.n_triangles()
    }

    /// The regions relabeled `A -> B -> C -> A`.
    pub fn rotated(&self) -> KpRegions {
        KpRegions { a: self.c.clone(), b: self.a.clone(), c: self.b.clone() }
    }
}

/// Hexagonal-distance radius of the region preset used when none is given:
/// a quarter of the shorter lattice side, at least 1.
pub fn default_radius(lat: &Lattice) -> usize {
    (lat.l_x().min(lat.l_y()) / 4).max(1)
}

/// Hexagon distance on the lattice with neighbor steps `(1,0)`, `(0,1)`, `(1,1)`.
fn hex_distance(dx: i64, dy: i64) -> i64 {
    if (dx >= 0) == (dy >= 0) {
        dx.abs().max(dy.abs())
    } else {
        dx.abs() + dy.abs()
    }
}

/// Three 120-degree sectors of the hexagonal disk of `radius` around the
/// lattice center. Sector `A` covers directions `[0, 120)` degrees, `B`
/// `[120, 240)` and `C` the rest; the center hexagon itself is left out so
/// that all three meet at the central vertex.
pub fn sector_centers(lat: &Lattice, radius: usize) -> Result<RegionCenters, LatticeError> {
    let r = radius as i64;
    if radius == 0 || 2 * r + 3 > lat.l_x().min(lat.l_y()) as i64 {
        return Err(LatticeError::InvalidArgument(format!(
            "sector radius {radius} does not fit a {}x{} lattice",
            lat.l_x(),
            lat.l_y()
        )));
    }
    let (cx, cy) = ((lat.l_x() / 2) as i64, (lat.l_y() / 2) as i64);
    let mut out = RegionCenters::default();
    for dy in -r..=r {
        for dx in -r..=r {
            if (dx, dy) == (0, 0) || hex_distance(dx, dy) > r {
                continue;
            }
            let v = ((cx + dx) as usize, (cy + dy) as usize);
            if dx > 0 && dy >= 0 {
                out.a.push(v);
            } else if dx <= 0 && dy > dx {
                out.b.push(v);
            } else {
                out.c.push(v);
            }
        }
    }
    Ok(out)
}

/// Resolves a preset name: `default` (radius from [`default_radius`]) or
/// `sector-R` for an explicit radius `R`.
pub fn preset(lat: &Lattice, name: &str) -> Result<KpRegions, LatticeError> {
    let radius = match name {
        "default" => default_radius(lat),
        other => other
            .strip_prefix("sector-")
            .and_then(|r| r.parse::<usize>().ok())
            .ok_or_else(|| LatticeError::InvalidArgument(format!("unknown region preset {other:?}")))?,
    };
    KpRegions::from_centers(lat, &sector_centers(lat, radius)?)
}

/// Parses a region-definition file: one region per line, e.g.
/// `A: (3,4) (4,4)`, listing hexagon centers. Blank lines and `#` comments
/// are ignored. All three regions must appear exactly once.
pub fn parse_region_file(text: &str) -> Result<RegionCenters, LatticeError> {
    let mut slots: [Option<Vec<(usize, usize)>>; 3] = [None, None, None];
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| LatticeError::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (label, rest) = line.split_once(':').ok_or_else(|| err("missing ':'".into()))?;
        let slot = match label.trim() {
            "A" => 0,
            "B" => 1,
            "C" => 2,
            other => return Err(err(format!("unknown region label {other:?}"))),
        };
        if slots[slot].is_some() {
            return Err(err(format!("region {} defined twice", label.trim())));
        }
        let mut centers = Vec::new();
        let mut rest = rest.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(|| err(format!("expected '(' at {rest:?}")))?;
            let close = body.find(')').ok_or_else(|| err("unclosed '('".into()))?;
            let (x, y) = body[..close].split_once(',').ok_or_else(|| err("expected 'x,y'".into()))?;
            let coord = |s: &str| s.trim().parse::<usize>().map_err(|e| err(format!("bad coordinate {s:?}: {e}")));
            centers.push((coord(x)?, coord(y)?));
            rest = body[close + 1..].trim_start();
        }
        if centers.is_empty() {
            return Err(err("region lists no hexagon centers".into()));
        }
        slots[slot] = Some(centers);
    }
    let [a, b, c] = slots;
    let missing = |l: &str| LatticeError::Parse { line: 0, message: format!("region {l} missing") };
    Ok(RegionCenters {
        a: a.ok_or_else(|| missing("A"))?,
        b: b.ok_or_else(|| missing("B"))?,
        c: c.ok_or_else(|| missing("C"))?,
    })
}

impl fmt::Display for RegionCenters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, centers) in [("A", &self.a), ("B", &self.b), ("C", &self.c)] {
            write!(f, "{label}:")?;
            for (x, y) in centers {
                write!(f, " ({x},{y})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
