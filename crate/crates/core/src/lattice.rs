//! Periodic triangular lattice with qubits on edges.
//!
//! Vertices are `(x, y)` with `0 <= x < l_x`, `0 <= y < l_y`. Each vertex owns
//! three edges:
//!
//! * `d0`: `(x, y) -> (x + 1, y)`
//! * `d1`: `(x, y) -> (x, y + 1)`
//! * `d2`: `(x, y) -> (x + 1, y + 1)`
//!
//! and each cell owns two triangles,
//! `T_up(x, y) = {d0(x, y), d1(x + 1, y), d2(x, y)}` and
//! `T_down(x, y) = {d1(x, y), d0(x, y + 1), d2(x, y)}`.
//!
//! Linear indices: vertex `y * l_x + x`, edge `3 * vertex + d`, triangle
//! `2 * vertex` (up) or `2 * vertex + 1` (down).

use thiserror::Error;

use crate::pauli::{Pauli, PauliOperator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice must be at least 3x3, got {l_x}x{l_y}")]
    InvalidSize { l_x: usize, l_y: usize },
    #[error("{what} {index} out of range")]
    OutOfRange { what: &'static str, index: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("region geometry: {0}")]
    RegionGeometry(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Which Pauli a string or loop carries: Wilson strings are `Z`, 't Hooft
/// strings are `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StringKind {
    Wilson,
    THooft,
}

impl StringKind {
    pub fn letter(self) -> Pauli {
        match self {
            StringKind::Wilson => Pauli::Z,
            StringKind::THooft => Pauli::X,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub x: usize,
    pub y: usize,
    pub d: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriangleId {
    pub x: usize,
    pub y: usize,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    l_x: usize,
    l_y: usize,
}

impl Lattice {
    pub fn new(l_x: usize, l_y: usize) -> Result<Self, LatticeError> {
        if l_x < 3 || l_y < 3 {
            return Err(LatticeError::InvalidSize { l_x, l_y });
        }
        Ok(Self { l_x, l_y })
    }

    pub fn l_x(&self) -> usize {
        self.l_x
    }

    pub fn l_y(&self) -> usize {
        self.l_y
    }

    pub fn n_vertices(&self) -> usize {
        self.l_x * self.l_y
    }

    /// Qubit count `N = 3 l_x l_y`.
    pub fn n_edges(&self) -> usize {
        3 * self.l_x * self.l_y
    }

    pub fn n_triangles(&self) -> usize {
        2 * self.l_x * self.l_y
    }

    fn wrap(&self, x: i64, y: i64) -> (usize, usize) {
        (x.rem_euclid(self.l_x as i64) as usize, y.rem_euclid(self.l_y as i64) as usize)
    }

    pub fn vertex_index(&self, x: i64, y: i64) -> usize {
        let (x, y) = self.wrap(x, y);
        y * self.l_x + x
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        Vertex { x: index % self.l_x, y: index / self.l_x }
    }

    /// Linear index of edge `d` owned by the (wrapped) vertex `(x, y)`.
    pub fn edge_index(&self, x: i64, y: i64, d: u8) -> usize {
        debug_assert!(d < 3);
        3 * self.vertex_index(x, y) + d as usize
    }

    pub fn edge(&self, index: usize) -> EdgeId {
        let v = self.vertex(index / 3);
        EdgeId { x: v.x, y: v.y, d: (index % 3) as u8 }
    }

    pub fn triangle_index(&self, x: i64, y: i64, orientation: Orientation) -> usize {
        2 * self.vertex_index(x, y) + (orientation == Orientation::Down) as usize
    }

    pub fn triangle(&self, index: usize) -> TriangleId {
        let v = self.vertex(index / 2);
        let orientation = if index.is_multiple_of(2) { Orientation::Up } else { Orientation::Down };
        TriangleId { x: v.x, y: v.y, orientation }
    }

    /// The two endpoint vertices of an edge.
    pub fn edge_vertices(&self, edge: usize) -> [usize; 2] {
        let EdgeId { x, y, d } = self.edge(edge);
        let (x, y) = (x as i64, y as i64);
        let (dx, dy) = match d {
            0 => (1, 0),
            1 => (0, 1),
            _ => (1, 1),
        };
        [self.vertex_index(x, y), self.vertex_index(x + dx, y + dy)]
    }

    /// The six edges meeting at vertex `s`.
    pub fn star_edges(&self, s: usize) -> [usize; 6] {
        let Vertex { x, y } = self.vertex(s);
        let (x, y) = (x as i64, y as i64);
        [
            self.edge_index(x, y, 0),
            self.edge_index(x, y, 1),
            self.edge_index(x, y, 2),
            self.edge_index(x - 1, y, 0),
            self.edge_index(x, y - 1, 1),
            self.edge_index(x - 1, y - 1, 2),
        ]
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        let TriangleId { x, y, orientation } = self.triangle(t);
        let (x, y) = (x as i64, y as i64);
        match orientation {
            Orientation::Up => [self.edge_index(x, y, 0), self.edge_index(x + 1, y, 1), self.edge_index(x, y, 2)],
            Orientation::Down => [self.edge_index(x, y, 1), self.edge_index(x, y + 1, 0), self.edge_index(x, y, 2)],
        }
    }

    pub fn triangle_vertices(&self, t: usize) -> [usize; 3] {
        let TriangleId { x, y, orientation } = self.triangle(t);
        let (x, y) = (x as i64, y as i64);
        let corner = match orientation {
            Orientation::Up => self.vertex_index(x + 1, y),
            Orientation::Down => self.vertex_index(x, y + 1),
        };
        [self.vertex_index(x, y), corner, self.vertex_index(x + 1, y + 1)]
    }

    /// The two triangles sharing an edge.
    pub fn edge_triangles(&self, edge: usize) -> [usize; 2] {
        let EdgeId { x, y, d } = self.edge(edge);
        let (x, y) = (x as i64, y as i64);
        use Orientation::{Down, Up};
        match d {
            0 => [self.triangle_index(x, y, Up), self.triangle_index(x, y - 1, Down)],
            1 => [self.triangle_index(x, y, Down), self.triangle_index(x - 1, y, Up)],
            _ => [self.triangle_index(x, y, Up), self.triangle_index(x, y, Down)],
        }
    }

    /// The six triangles around vertex `s` (its hexagon).
    pub fn vertex_triangles(&self, s: usize) -> [usize; 6] {
        let Vertex { x, y } = self.vertex(s);
        let (x, y) = (x as i64, y as i64);
        use Orientation::{Down, Up};
        [
            self.triangle_index(x, y, Up),
            self.triangle_index(x - 1, y, Up),
            self.triangle_index(x - 1, y - 1, Up),
            self.triangle_index(x, y, Down),
            self.triangle_index(x - 1, y - 1, Down),
            self.triangle_index(x, y - 1, Down),
        ]
    }

    /// Star operator `A_s`: `X` on the six edges at vertex `s`.
    pub fn star_operator(&self, s: usize) -> Result<PauliOperator, LatticeError> {
        if s >= self.n_vertices() {
            return Err(LatticeError::OutOfRange { what: "vertex", index: s });
        }
        Ok(PauliOperator::x_type(self.n_edges(), &self.star_edges(s)).expect("edges in range"))
    }

    /// Plaquette operator `B_p`: `Z` on the three edges of triangle `p`.
    pub fn plaquette_operator(&self, p: usize) -> Result<PauliOperator, LatticeError> {
        if p >= self.n_triangles() {
            return Err(LatticeError::OutOfRange { what: "triangle", index: p });
        }
        Ok(PauliOperator::z_type(self.n_edges(), &self.triangle_edges(p)).expect("edges in range"))
    }

    /// Edges of the open zigzag string from `(x0, y)` to `(x0 + r, y)`:
    /// `d2(x0 + k, y), d1(x0 + k + 1, y)` for `k = 0..r`.
    pub fn zigzag_string_edges(&self, x0: usize, y: usize, r: usize) -> Result<Vec<usize>, LatticeError> {
        if r == 0 || r >= self.l_x {
            return Err(LatticeError::InvalidArgument(format!("string length {r} outside 1..{}", self.l_x - 1)));
        }
        if x0 >= self.l_x || y >= self.l_y {
            return Err(LatticeError::OutOfRange { what: "vertex", index: self.vertex_index(x0 as i64, y as i64) });
        }
        let (x0, y) = (x0 as i64, y as i64);
        Ok((0..r as i64).flat_map(|k| [self.edge_index(x0 + k, y, 2), self.edge_index(x0 + k + 1, y, 1)]).collect())
    }

    /// Wilson (`Z`) or 't Hooft (`X`) string of `2r` edges.
    pub fn zigzag_string(
        &self,
        x0: usize,
        y: usize,
        r: usize,
        kind: StringKind,
    ) -> Result<PauliOperator, LatticeError> {
        let edges = self.zigzag_string_edges(x0, y, r)?;
        Ok(PauliOperator::uniform(self.n_edges(), &edges, kind.letter()).expect("edges in range"))
    }

    /// Edges of the closed zigzag in row `y`, winding once in `x`.
    pub fn zigzag_loop_edges(&self, y: usize) -> Result<Vec<usize>, LatticeError> {
        if y >= self.l_y {
            return Err(LatticeError::OutOfRange { what: "row", index: y });
        }
        let y = y as i64;
        Ok((0..self.l_x as i64).flat_map(|x| [self.edge_index(x, y, 2), self.edge_index(x + 1, y, 1)]).collect())
    }

    /// Non-contractible loop `W^c(y)` (Wilson) or `T^c(y)` ('t Hooft).
    pub fn zigzag_loop(&self, y: usize, kind: StringKind) -> Result<PauliOperator, LatticeError> {
        let edges = self.zigzag_loop_edges(y)?;
        Ok(PauliOperator::uniform(self.n_edges(), &edges, kind.letter()).expect("edges in range"))
    }
}
