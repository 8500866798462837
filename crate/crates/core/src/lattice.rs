//! Finite hypercubic qudit lattices and the region calculus used by every
//! locality predicate.
//!
//! Sites are numbered row-major over their coordinates (axis 0 most
//! significant), and that numbering fixes the tensor-factor order of every
//! operator built on the lattice.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of site indices, iterated in increasing (row-major) order.
pub type SiteSet = BTreeSet<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Open => f.write_str("open"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

/// Which regions `A` a sweep visits. Every policy keeps only regions whose
/// exterior `B` is non-empty.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionPolicy {
    Singletons,
    /// All regions with at most two sites plus every contiguous block.
    #[default]
    Blocks,
    /// Every subset of the lattice. Exponential in the number of sites.
    All,
}

impl std::str::FromStr for RegionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singletons" => Ok(RegionPolicy::Singletons),
            "blocks" => Ok(RegionPolicy::Blocks),
            "all" => Ok(RegionPolicy::All),
            other => Err(Error::InvalidSpec(format!("unknown region policy `{other}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeSpec {
    #[serde(rename = "d_L")]
    dimension: usize,
    #[serde(rename = "M")]
    size: usize,
    #[serde(default = "default_local_dim")]
    d: usize,
    #[serde(default = "default_boundary")]
    boundary: Boundary,
    #[serde(default = "default_range")]
    r: usize,
}

fn default_local_dim() -> usize {
    2
}

fn default_boundary() -> Boundary {
    Boundary::Open
}

fn default_range() -> usize {
    1
}

/// A `d_L`-dimensional grid of `M^{d_L}` qudits of local dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec", into = "LatticeSpec")]
pub struct Lattice {
    dimension: usize,
    size: usize,
    local_dim: usize,
    boundary: Boundary,
    range: usize,
}

impl TryFrom<LatticeSpec> for Lattice {
    type Error = Error;

    fn try_from(spec: LatticeSpec) -> Result<Self> {
        Lattice::new(spec.dimension, spec.size, spec.d, spec.boundary, spec.r)
    }
}

impl From<Lattice> for LatticeSpec {
    fn from(lat: Lattice) -> Self {
        LatticeSpec {
            dimension: lat.dimension,
            size: lat.size,
            d: lat.local_dim,
            boundary: lat.boundary,
            r: lat.range,
        }
    }
}

impl Lattice {
    pub fn new(
        dimension: usize,
        size: usize,
        local_dim: usize,
        boundary: Boundary,
        range: usize,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidLattice("spatial dimension must be positive".into()));
        }
        if size == 0 {
            return Err(Error::InvalidLattice("linear size must be positive".into()));
        }
        if local_dim < 2 {
            return Err(Error::InvalidLattice(format!(
                "local dimension must be at least 2, got {local_dim}"
            )));
        }
        if range == 0 {
            return Err(Error::InvalidLattice("range must be positive".into()));
        }
        if boundary == Boundary::Periodic && 4 * range > size {
            return Err(Error::InvalidLattice(format!(
                "periodic lattices need r <= M/4 (r = {range}, M = {size})"
            )));
        }
        size.checked_pow(dimension as u32)
            .filter(|&n| n <= 1 << 20)
            .ok_or_else(|| Error::InvalidLattice("too many sites".into()))?;
        Ok(Lattice { dimension, size, local_dim, boundary, range })
    }

    /// Open chain of qubits with range 1.
    pub fn chain(size: usize, boundary: Boundary) -> Result<Self> {
        Lattice::new(1, size, 2, boundary, 1)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn num_sites(&self) -> usize {
        self.size.pow(self.dimension as u32)
    }

    /// Copy of this lattice with another linear size.
    pub fn with_size(&self, size: usize) -> Result<Self> {
        Lattice::new(self.dimension, size, self.local_dim, self.boundary, self.range)
    }

    pub fn with_range(&self, range: usize) -> Result<Self> {
        Lattice::new(self.dimension, self.size, self.local_dim, self.boundary, range)
    }

    /// Dimension of the full Hilbert space, `d^N`.
    pub fn hilbert_dim(&self) -> usize {
        self.local_dim.pow(self.num_sites() as u32)
    }

    pub fn sites(&self) -> SiteSet {
        (0..self.num_sites()).collect()
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.dimension];
        let mut rest = index;
        for axis in (0..self.dimension).rev() {
            coords[axis] = rest % self.size;
            rest /= self.size;
        }
        coords
    }

    pub fn index(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.dimension || coords.iter().any(|&c| c >= self.size) {
            return Err(Error::CoordinateOutOfRange { coord: coords.to_vec(), size: self.size });
        }
        Ok(coords.iter().fold(0, |acc, &c| acc * self.size + c))
    }

    fn check_site(&self, index: usize) -> Result<()> {
        if index >= self.num_sites() {
            return Err(Error::SiteOutOfRange { index, sites: self.num_sites() });
        }
        Ok(())
    }

    fn axis_distance(&self, x: usize, y: usize) -> usize {
        let diff = x.abs_diff(y);
        match self.boundary {
            Boundary::Open => diff,
            Boundary::Periodic => diff.min(self.size - diff),
        }
    }

    /// Graph distance between two sites.
    pub fn distance(&self, n: usize, m: usize) -> Result<usize> {
        self.check_site(n)?;
        self.check_site(m)?;
        Ok(self.distance_unchecked(n, m))
    }

    fn distance_unchecked(&self, n: usize, m: usize) -> usize {
        let (cn, cm) = (self.coords(n), self.coords(m));
        cn.iter().zip(&cm).map(|(&x, &y)| self.axis_distance(x, y)).sum()
    }

    /// Graph distance between two coordinate vectors.
    pub fn coord_distance(&self, n: &[usize], m: &[usize]) -> Result<usize> {
        self.distance(self.index(n)?, self.index(m)?)
    }

    pub fn distance_to_set(&self, n: usize, set: &SiteSet) -> Option<usize> {
        set.iter().map(|&m| self.distance_unchecked(n, m)).min()
    }

    /// Nearest neighbours of a site, sorted and without duplicates.
    pub fn neighbors(&self, n: usize) -> Vec<usize> {
        let coords = self.coords(n);
        let mut out = BTreeSet::new();
        for axis in 0..self.dimension {
            for step in [-1i64, 1] {
                let moved = coords[axis] as i64 + step;
                let wrapped = match self.boundary {
                    Boundary::Open if moved < 0 || moved >= self.size as i64 => continue,
                    Boundary::Open => moved as usize,
                    Boundary::Periodic => moved.rem_euclid(self.size as i64) as usize,
                };
                let mut next = coords.clone();
                next[axis] = wrapped;
                let m = next.iter().fold(0, |acc, &c| acc * self.size + c);
                if m != n {
                    out.insert(m);
                }
            }
        }
        out.into_iter().collect()
    }

    /// All edges `(n, m)` with `n < m`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for n in 0..self.num_sites() {
            for m in self.neighbors(n) {
                if n < m {
                    edges.push((n, m));
                }
            }
        }
        edges
    }

    /// Sites within `radius` of `n`, including `n` itself.
    pub fn ball(&self, n: usize, radius: usize) -> SiteSet {
        (0..self.num_sites())
            .filter(|&m| self.distance_unchecked(n, m) <= radius)
            .collect()
    }

    /// Sites outside `set` at distance at most `radius` from it.
    pub fn neighborhood(&self, set: &SiteSet, radius: usize) -> SiteSet {
        (0..self.num_sites())
            .filter(|m| !set.contains(m))
            .filter(|&m| self.distance_to_set(m, set).is_some_and(|dist| dist <= radius))
            .collect()
    }

    fn check_set(&self, set: &SiteSet) -> Result<()> {
        match set.iter().next_back() {
            None => Err(Error::EmptyRegion),
            Some(&max) => self.check_site(max),
        }
    }

    /// Splits the lattice into `A`, its `r`-neighbourhood `a`, the next shell
    /// `b = a_{2r} \ a_r`, and the remainder `B`.
    pub fn partition(&self, region: &SiteSet) -> Result<RegionPartition> {
        self.check_set(region)?;
        let neighborhood = self.neighborhood(region, self.range);
        let shell: SiteSet = self
            .neighborhood(region, 2 * self.range)
            .difference(&neighborhood)
            .copied()
            .collect();
        let exterior = (0..self.num_sites())
            .filter(|m| !region.contains(m) && !neighborhood.contains(m) && !shell.contains(m))
            .collect();
        Ok(RegionPartition { region: region.clone(), neighborhood, shell, exterior })
    }

    /// Whether `A` belongs to `S`, i.e. its exterior `B` is non-empty.
    pub fn in_s(&self, region: &SiteSet) -> bool {
        self.partition(region).map(|p| p.in_s()).unwrap_or(false)
    }

    /// Number of edges with exactly one endpoint in `set`.
    pub fn boundary_size(&self, set: &SiteSet) -> usize {
        self.edges()
            .into_iter()
            .filter(|(n, m)| set.contains(n) != set.contains(m))
            .count()
    }

    /// Every `A ∈ S` with `|A| <= max_size`, ordered lexicographically by the
    /// sorted site list.
    pub fn enumerate_s(&self, max_size: usize) -> Vec<SiteSet> {
        let n = self.num_sites();
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.collect_subsets(0, n, max_size.min(n), &mut current, &mut out);
        out.retain(|set| self.in_s(set));
        out.sort_by(|x, y| x.iter().cmp(y.iter()));
        out
    }

    fn collect_subsets(
        &self,
        start: usize,
        n: usize,
        max_size: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<SiteSet>,
    ) {
        if !current.is_empty() {
            out.push(current.iter().copied().collect());
        }
        if current.len() == max_size {
            return;
        }
        for site in start..n {
            current.push(site);
            self.collect_subsets(site + 1, n, max_size, current, out);
            current.pop();
        }
    }

    /// All proper, non-empty hyper-rectangular blocks (wrapping around under
    /// periodic boundaries), sorted lexicographically.
    pub fn contiguous_blocks(&self) -> Vec<SiteSet> {
        let axis_ranges: Vec<(usize, usize)> = match self.boundary {
            Boundary::Open => (0..self.size)
                .flat_map(|start| (1..=self.size - start).map(move |len| (start, len)))
                .collect(),
            Boundary::Periodic => (0..self.size)
                .flat_map(|start| (1..self.size).map(move |len| (start, len)))
                .chain(std::iter::once((0, self.size)))
                .collect(),
        };
        let mut blocks = BTreeSet::new();
        let mut choice = vec![0usize; self.dimension];
        loop {
            let mut sites = BTreeSet::new();
            self.fill_block(&axis_ranges, &choice, 0, &mut vec![0; self.dimension], &mut sites);
            if sites.len() < self.num_sites() {
                blocks.insert(sites.into_iter().collect::<Vec<_>>());
            }
            let mut axis = 0;
            loop {
                if axis == self.dimension {
                    return blocks.into_iter().map(|b| b.into_iter().collect()).collect();
                }
                choice[axis] += 1;
                if choice[axis] < axis_ranges.len() {
                    break;
                }
                choice[axis] = 0;
                axis += 1;
            }
        }
    }

    fn fill_block(
        &self,
        ranges: &[(usize, usize)],
        choice: &[usize],
        axis: usize,
        coords: &mut Vec<usize>,
        out: &mut BTreeSet<usize>,
    ) {
        if axis == self.dimension {
            out.insert(coords.iter().fold(0, |acc, &c| acc * self.size + c));
            return;
        }
        let (start, len) = ranges[choice[axis]];
        for offset in 0..len {
            coords[axis] = (start + offset) % self.size;
            self.fill_block(ranges, choice, axis + 1, coords, out);
        }
    }

    /// The regions a sweep visits under `policy`; all of them are in `S`.
    pub fn regions(&self, policy: RegionPolicy) -> Vec<SiteSet> {
        let mut regions: Vec<SiteSet> = match policy {
            RegionPolicy::Singletons => (0..self.num_sites())
                .map(|n| std::iter::once(n).collect())
                .filter(|set| self.in_s(set))
                .collect(),
            RegionPolicy::Blocks => {
                let mut all: BTreeSet<Vec<usize>> = self
                    .enumerate_s(2)
                    .into_iter()
                    .map(|s| s.into_iter().collect())
                    .collect();
                for block in self.contiguous_blocks() {
                    if self.in_s(&block) {
                        all.insert(block.into_iter().collect());
                    }
                }
                all.into_iter().map(|v| v.into_iter().collect()).collect()
            }
            RegionPolicy::All => self.enumerate_s(self.num_sites()),
        };
        regions.sort_by(|x, y| x.iter().cmp(y.iter()));
        regions
    }

    /// Translates every site by `shift` (componentwise, modulo `M`).
    pub fn translate(&self, set: &SiteSet, shift: &[usize]) -> Result<SiteSet> {
        if shift.len() != self.dimension {
            return Err(Error::InvalidSpec("shift has the wrong number of components".into()));
        }
        set.iter()
            .map(|&n| {
                let moved: Vec<usize> = self
                    .coords(n)
                    .iter()
                    .zip(shift)
                    .map(|(&c, &s)| (c + s) % self.size)
                    .collect();
                self.index(&moved)
            })
            .collect()
    }

    /// Sorted coordinate lists for a site set, the JSON form of regions.
    pub fn set_coords(&self, set: &SiteSet) -> Vec<Vec<usize>> {
        set.iter().map(|&n| self.coords(n)).collect()
    }

    pub fn set_from_coords(&self, coords: &[Vec<usize>]) -> Result<SiteSet> {
        coords.iter().map(|c| self.index(c)).collect()
    }

    /// A Hamiltonian path through the lattice (boustrophedon order in more
    /// than one dimension). Consecutive entries are always neighbours.
    pub fn snake_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.num_sites());
        let mut coords = vec![0usize; self.dimension];
        self.snake_axis(0, false, &mut coords, &mut order);
        order
    }

    fn snake_axis(&self, axis: usize, reversed: bool, coords: &mut Vec<usize>, out: &mut Vec<usize>) {
        if axis == self.dimension {
            out.push(coords.iter().fold(0, |acc, &c| acc * self.size + c));
            return;
        }
        for step in 0..self.size {
            coords[axis] = if reversed { self.size - 1 - step } else { step };
            // parity of the steps taken on the outer axes decides the direction
            let flip = step % 2 == 1;
            self.snake_axis(axis + 1, flip, coords, out);
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}d,M={},d={},{},r={}",
            self.dimension, self.size, self.local_dim, self.boundary, self.range
        )
    }
}

impl std::str::FromStr for Lattice {
    type Err = Error;

    /// Parses the compact form `1d,M=4,open` (optional `d=`, `r=` fields) or
    /// a JSON object `{"d_L":1,"M":4,"d":2,"boundary":"open","r":1}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let mut spec = LatticeSpec {
            dimension: 1,
            size: 0,
            d: default_local_dim(),
            boundary: default_boundary(),
            r: default_range(),
        };
        let parse = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::InvalidSpec(format!("bad number `{v}` in lattice `{s}`")))
        };
        for field in s.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match field.split_once('=') {
                Some(("M", v)) => spec.size = parse(v)?,
                Some(("d", v)) => spec.d = parse(v)?,
                Some(("r", v)) => spec.r = parse(v)?,
                Some(("d_L", v)) => spec.dimension = parse(v)?,
                None if field == "open" => spec.boundary = Boundary::Open,
                None if field == "periodic" => spec.boundary = Boundary::Periodic,
                None if field.ends_with('d') || field.ends_with('D') => {
                    spec.dimension = parse(&field[..field.len() - 1])?
                }
                _ => return Err(Error::InvalidSpec(format!("unknown lattice field `{field}`"))),
            }
        }
        Lattice::try_from(spec)
    }
}

/// The four-way split `V = A ∪ a ∪ b ∪ B` around a region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPartition {
    /// `A`
    pub region: SiteSet,
    /// `a`: sites outside `A` within distance `r`.
    pub neighborhood: SiteSet,
    /// `b`: sites at distance in `(r, 2r]`.
    pub shell: SiteSet,
    /// `B`: everything else.
    pub exterior: SiteSet,
}

impl RegionPartition {
    /// `Ā = A ∪ a`
    pub fn closure(&self) -> SiteSet {
        self.region.union(&self.neighborhood).copied().collect()
    }

    /// `B̄ = B ∪ b`, the complement of `Ā`.
    pub fn outer_closure(&self) -> SiteSet {
        self.exterior.union(&self.shell).copied().collect()
    }

    pub fn in_s(&self) -> bool {
        !self.exterior.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(sites: &[usize]) -> SiteSet {
        sites.iter().copied().collect()
    }

    #[test]
    fn distances() {
        let open = Lattice::chain(4, Boundary::Open).unwrap();
        assert_eq!(open.distance(0, 3).unwrap(), 3);
        let ring = Lattice::chain(4, Boundary::Periodic).unwrap();
        assert_eq!(ring.distance(0, 3).unwrap(), 1);
        let grid = Lattice::new(2, 4, 2, Boundary::Open, 1).unwrap();
        assert_eq!(grid.coord_distance(&[0, 0], &[1, 1]).unwrap(), 2);
        assert!(matches!(open.distance(0, 4), Err(Error::SiteOutOfRange { .. })));
        assert!(grid.coord_distance(&[0, 4], &[0, 0]).is_err());
    }

    #[test]
    fn partitions_of_small_chains() {
        let open = Lattice::chain(4, Boundary::Open).unwrap();
        let p = open.partition(&set(&[0])).unwrap();
        assert_eq!((p.neighborhood.clone(), p.shell.clone(), p.exterior.clone()), (set(&[1]), set(&[2]), set(&[3])));
        assert!(p.in_s());

        let ring = Lattice::chain(4, Boundary::Periodic).unwrap();
        let p = ring.partition(&set(&[0])).unwrap();
        assert_eq!((p.neighborhood.clone(), p.shell.clone(), p.exterior.clone()), (set(&[1, 3]), set(&[2]), set(&[])));
        assert!(!p.in_s());

        let ring6 = Lattice::chain(6, Boundary::Periodic).unwrap();
        let p = ring6.partition(&set(&[0])).unwrap();
        assert_eq!((p.neighborhood.clone(), p.shell.clone(), p.exterior.clone()), (set(&[1, 5]), set(&[2, 4]), set(&[3])));
        assert!(p.in_s());

        assert!(matches!(open.partition(&set(&[])), Err(Error::EmptyRegion)));
    }

    #[test]
    fn boundary_sizes() {
        let open = Lattice::chain(6, Boundary::Open).unwrap();
        assert_eq!(open.boundary_size(&set(&[0, 1, 2])), 1);
        let ring = Lattice::chain(6, Boundary::Periodic).unwrap();
        assert_eq!(ring.boundary_size(&set(&[0, 1, 2])), 2);
        let grid = Lattice::new(2, 4, 2, Boundary::Open, 1).unwrap();
        let left: SiteSet = (0..4)
            .flat_map(|y| [grid.index(&[0, y]).unwrap(), grid.index(&[1, y]).unwrap()])
            .collect();
        assert_eq!(grid.boundary_size(&left), 4);
    }

    // Oracle: partition() applied to every singleton.
    fn singletons_in_s(lat: &Lattice) -> Vec<SiteSet> {
        (0..lat.num_sites())
            .map(|n| set(&[n]))
            .filter(|s| !lat.partition(s).unwrap().exterior.is_empty())
            .collect()
    }

    #[test]
    fn enumerate_s_matches_brute_force() {
        let open4 = Lattice::chain(4, Boundary::Open).unwrap();
        assert_eq!(open4.enumerate_s(1), vec![set(&[0]), set(&[3])]);
        assert_eq!(open4.enumerate_s(1), singletons_in_s(&open4));

        let open6 = Lattice::chain(6, Boundary::Open).unwrap();
        assert_eq!(open6.enumerate_s(1), (0..6).map(|n| set(&[n])).collect::<Vec<_>>());
        assert_eq!(open6.enumerate_s(1), singletons_in_s(&open6));

        let ring4 = Lattice::chain(4, Boundary::Periodic).unwrap();
        assert!(ring4.enumerate_s(4).is_empty());
    }

    #[test]
    fn ranges_and_validation() {
        assert!(Lattice::chain(3, Boundary::Periodic).is_err());
        assert!(Lattice::new(1, 4, 1, Boundary::Open, 1).is_err());
        let open = Lattice::new(1, 6, 2, Boundary::Open, 2).unwrap();
        let p = open.partition(&set(&[0])).unwrap();
        assert_eq!((p.neighborhood, p.shell, p.exterior), (set(&[1, 2]), set(&[3, 4]), set(&[5])));
    }

    #[test]
    fn neighbors_and_edges() {
        let grid = Lattice::new(2, 3, 2, Boundary::Periodic, 1);
        assert!(grid.is_err());
        let grid = Lattice::new(2, 4, 2, Boundary::Periodic, 1).unwrap();
        assert!((0..16).all(|n| grid.neighbors(n).len() == 4));
        assert_eq!(grid.edges().len(), 32);
        let open = Lattice::new(2, 4, 2, Boundary::Open, 1).unwrap();
        assert_eq!(open.edges().len(), 24);
        assert_eq!(open.neighbors(5).len(), 4);
    }

    #[test]
    fn blocks_and_policies() {
        let open = Lattice::chain(4, Boundary::Open).unwrap();
        assert_eq!(open.contiguous_blocks().len(), 9);
        assert_eq!(open.regions(RegionPolicy::Blocks), vec![set(&[0]), set(&[3])]);
        let ring = Lattice::chain(6, Boundary::Periodic).unwrap();
        // 6 starts x 5 lengths
        assert_eq!(ring.contiguous_blocks().len(), 30);
        assert_eq!(ring.regions(RegionPolicy::Singletons).len(), 6);
        let open6 = Lattice::chain(6, Boundary::Open).unwrap();
        let blocks = open6.regions(RegionPolicy::Blocks);
        assert!(blocks.contains(&set(&[0, 1, 2])));
        assert!(blocks.iter().all(|b| open6.in_s(b)));
    }

    #[test]
    fn snake_visits_neighbors() {
        for lat in [
            Lattice::new(2, 4, 2, Boundary::Open, 1).unwrap(),
            Lattice::new(2, 3, 2, Boundary::Open, 1).unwrap(),
            Lattice::chain(5, Boundary::Open).unwrap(),
        ] {
            let order = lat.snake_order();
            assert_eq!(order.iter().copied().collect::<SiteSet>(), lat.sites());
            for w in order.windows(2) {
                assert_eq!(lat.distance(w[0], w[1]).unwrap(), 1);
            }
        }
    }

    #[test]
    fn parses_compact_and_json_forms() {
        let lat: Lattice = "1d,M=4,open".parse().unwrap();
        assert_eq!(lat, Lattice::chain(4, Boundary::Open).unwrap());
        let lat: Lattice = "2d,M=4,periodic,d=3".parse().unwrap();
        assert_eq!((lat.dimension(), lat.local_dim(), lat.boundary()), (2, 3, Boundary::Periodic));
        let lat: Lattice = r#"{"d_L":1,"M":6,"d":2,"boundary":"periodic","r":1}"#.parse().unwrap();
        assert_eq!(lat.to_string(), "1d,M=6,d=2,periodic,r=1");
        let back: Lattice = serde_json::from_str(&serde_json::to_string(&lat).unwrap()).unwrap();
        assert_eq!(back, lat);
        assert!("1d,M=3,periodic".parse::<Lattice>().is_err());
    }
}
