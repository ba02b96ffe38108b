//! Discrete navigation world: cells, metric distances, navigability,
//! deployment zones and the 8-direction motion model.
//!
//! All coordinates are grid cells; `cell_size_m` converts to meters where a
//! metric quantity (safety distance, influence radius) is needed. One move
//! displaces a vehicle by exactly [`MOVE_CELLS`] cells and both the
//! intermediate and the target cell must be navigable, which prevents
//! tunnelling through one-cell land strips.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::OnceLock;

/// Cells traversed by a single move (580 m at the default 290 m cell size).
pub const MOVE_CELLS: i64 = 2;

/// Grid position, row-major with row 0 at the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// The eight movement directions, in their canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    South,
    SouthEast,
    East,
    NorthEast,
    North,
    NorthWest,
    West,
    SouthWest,
}

impl Action {
    pub const ALL: [Action; 8] = [
        Action::South,
        Action::SouthEast,
        Action::East,
        Action::NorthEast,
        Action::North,
        Action::NorthWest,
        Action::West,
        Action::SouthWest,
    ];

    /// (row, col) displacement of one step in this direction.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Action::South => (1, 0),
            Action::SouthEast => (1, 1),
            Action::East => (0, 1),
            Action::NorthEast => (-1, 1),
            Action::North => (-1, 0),
            Action::NorthWest => (-1, -1),
            Action::West => (0, -1),
            Action::SouthWest => (1, -1),
        }
    }

    pub fn index(self) -> usize {
        Action::ALL.iter().position(|&a| a == self).unwrap()
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    pub fn reverse(self) -> Action {
        let (dr, dc) = self.delta();
        Action::ALL
            .into_iter()
            .find(|a| a.delta() == (-dr, -dc))
            .unwrap()
    }

    /// Unit vector in (row, col) space; used for angular matching.
    pub fn unit_vector(self) -> (f64, f64) {
        let (dr, dc) = self.delta();
        let n = ((dr * dr + dc * dc) as f64).sqrt();
        (dr as f64 / n, dc as f64 / n)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Action::South => "S",
            Action::SouthEast => "SE",
            Action::East => "E",
            Action::NorthEast => "NE",
            Action::North => "N",
            Action::NorthWest => "NW",
            Action::West => "W",
            Action::SouthWest => "SW",
        };
        f.write_str(s)
    }
}

/// Initial deployment area for one vehicle.
#[derive(Debug, Clone)]
pub struct DeploymentZone {
    pub id: u32,
    pub cells: Vec<Cell>,
}

/// Immutable navigability grid with metric cell size and deployment zones.
///
/// Construction validates every invariant, after which the map is safe for
/// unrestricted concurrent reads.
#[derive(Debug, Clone)]
pub struct NavMap {
    height: usize,
    width: usize,
    cell_size_m: f64,
    navigable: Vec<bool>,
    zones: Vec<DeploymentZone>,
    /// Dense index among navigable cells, or u32::MAX for land.
    nav_index: Vec<u32>,
    nav_cells: Vec<Cell>,
}

impl NavMap {
    pub fn from_parts(
        height: usize,
        width: usize,
        cell_size_m: f64,
        navigable: Vec<bool>,
        zones: Vec<DeploymentZone>,
    ) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Config("map dimensions must be positive".into()));
        }
        if !(cell_size_m > 0.0) {
            return Err(Error::Config("cell size must be positive".into()));
        }
        if navigable.len() != height * width {
            return Err(Error::Config(format!(
                "navigability mask has {} entries for a {}x{} map",
                navigable.len(),
                height,
                width
            )));
        }
        let mut nav_index = vec![u32::MAX; height * width];
        let mut nav_cells = Vec::new();
        for r in 0..height {
            for c in 0..width {
                if navigable[r * width + c] {
                    nav_index[r * width + c] = nav_cells.len() as u32;
                    nav_cells.push(Cell::new(r, c));
                }
            }
        }
        if nav_cells.is_empty() {
            return Err(Error::Config("map has no navigable cell".into()));
        }
        let map = NavMap { height, width, cell_size_m, navigable, zones, nav_index, nav_cells };
        for zone in &map.zones {
            if zone.cells.is_empty() {
                return Err(Error::Config(format!("zone {} is empty", zone.id)));
            }
            for &cell in &zone.cells {
                if !map.is_navigable(cell) {
                    return Err(Error::Config(format!(
                        "zone {} cell {} not navigable",
                        zone.id, cell
                    )));
                }
            }
        }
        Ok(map)
    }

    /// Parses the text map format.
    ///
    /// Line 1 is `MAP <height> <width> <cell_size_m>`, followed by `height`
    /// rows of `width` space-separated 0/1 tokens, then zero or more
    /// `ZONE <id> <row> <col> ...` lines listing zone cells.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty map file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "MAP" {
            return Err(Error::parse(ln + 1, "expected header: MAP <height> <width> <cell_size_m>"));
        }
        let height: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(ln + 1, "bad height"))?;
        let width: usize = fields[2]
            .parse()
            .map_err(|_| Error::parse(ln + 1, "bad width"))?;
        let cell_size_m: f64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(ln + 1, "bad cell size"))?;

        let mut navigable = Vec::with_capacity(height * width);
        for r in 0..height {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| Error::parse(r + 2, format!("missing grid row {r}")))?;
            let toks: Vec<&str> = row.split_whitespace().collect();
            if toks.len() != width {
                return Err(Error::parse(
                    ln + 1,
                    format!("ragged row: expected {} tokens, found {}", width, toks.len()),
                ));
            }
            for t in toks {
                match t {
                    "0" => navigable.push(false),
                    "1" => navigable.push(true),
                    other => {
                        return Err(Error::parse(ln + 1, format!("bad grid token '{other}'")))
                    }
                }
            }
        }

        let mut zones = Vec::new();
        for (ln, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] != "ZONE" {
                return Err(Error::parse(ln + 1, format!("unexpected directive '{}'", toks[0])));
            }
            if toks.len() < 4 || (toks.len() - 2) % 2 != 0 {
                return Err(Error::parse(ln + 1, "ZONE needs an id and (row, col) pairs"));
            }
            let id: u32 = toks[1]
                .parse()
                .map_err(|_| Error::parse(ln + 1, "bad zone id"))?;
            let mut cells = Vec::new();
            for pair in toks[2..].chunks(2) {
                let row: usize = pair[0]
                    .parse()
                    .map_err(|_| Error::parse(ln + 1, "bad zone row"))?;
                let col: usize = pair[1]
                    .parse()
                    .map_err(|_| Error::parse(ln + 1, "bad zone col"))?;
                if row >= height || col >= width {
                    return Err(Error::parse(ln + 1, format!("zone cell ({row},{col}) out of bounds")));
                }
                if !navigable[row * width + col] {
                    return Err(Error::parse(
                        ln + 1,
                        format!("zone cell not navigable: ({row},{col})"),
                    ));
                }
                cells.push(Cell::new(row, col));
            }
            zones.push(DeploymentZone { id, cells });
        }

        NavMap::from_parts(height, width, cell_size_m, navigable, zones)
    }

    /// The bundled synthetic lake (58x38, 290 m cells, 3 deployment zones).
    pub fn default_map() -> &'static NavMap {
        static MAP: OnceLock<NavMap> = OnceLock::new();
        MAP.get_or_init(|| {
            NavMap::parse(include_str!("../assets/default_map.txt"))
                .expect("bundled map must parse")
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cell_size_m(&self) -> f64 {
        self.cell_size_m
    }

    pub fn zones(&self) -> &[DeploymentZone] {
        &self.zones
    }

    pub fn is_navigable(&self, cell: Cell) -> bool {
        cell.row < self.height && cell.col < self.width && self.navigable[cell.row * self.width + cell.col]
    }

    /// Dense index of `cell` among navigable cells (row-major order).
    pub fn nav_index(&self, cell: Cell) -> Option<usize> {
        if !self.is_navigable(cell) {
            return None;
        }
        Some(self.nav_index[cell.row * self.width + cell.col] as usize)
    }

    /// All navigable cells in row-major order; `nav_index` inverts this.
    pub fn navigable_cells(&self) -> &[Cell] {
        &self.nav_cells
    }

    pub fn navigable_count(&self) -> usize {
        self.nav_cells.len()
    }

    /// Applies a move of [`MOVE_CELLS`] cells; `None` when the intermediate
    /// or target cell is out of bounds or land (a blocked move, not an error).
    pub fn apply_action(&self, from: Cell, action: Action) -> Option<Cell> {
        let (dr, dc) = action.delta();
        let mut row = from.row as i64;
        let mut col = from.col as i64;
        for _ in 0..MOVE_CELLS {
            row += dr;
            col += dc;
            if row < 0 || col < 0 {
                return None;
            }
            let cell = Cell::new(row as usize, col as usize);
            if !self.is_navigable(cell) {
                return None;
            }
        }
        Some(Cell::new(row as usize, col as usize))
    }

    /// Euclidean distance between cell centers, in meters.
    pub fn distance_m(&self, a: Cell, b: Cell) -> f64 {
        let dr = a.row as f64 - b.row as f64;
        let dc = a.col as f64 - b.col as f64;
        (dr * dr + dc * dc).sqrt() * self.cell_size_m
    }

    /// Navigable cells whose center lies within `radius_m` of `center`.
    pub fn disk(&self, center: Cell, radius_m: f64) -> Vec<Cell> {
        let r_cells = (radius_m / self.cell_size_m).max(0.0).ceil() as i64;
        let mut out = Vec::new();
        for dr in -r_cells..=r_cells {
            let row = center.row as i64 + dr;
            if row < 0 || row >= self.height as i64 {
                continue;
            }
            for dc in -r_cells..=r_cells {
                let col = center.col as i64 + dc;
                if col < 0 || col >= self.width as i64 {
                    continue;
                }
                let cell = Cell::new(row as usize, col as usize);
                if self.is_navigable(cell) && self.distance_m(center, cell) <= radius_m {
                    out.push(cell);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_water(h: usize, w: usize) -> NavMap {
        NavMap::from_parts(h, w, 290.0, vec![true; h * w], vec![]).unwrap()
    }

    #[test]
    fn parse_small_grid() {
        let map = NavMap::parse("MAP 2 2 290\n1 1\n1 0\n").unwrap();
        assert_eq!(map.navigable_count(), 3);
        assert!(map.is_navigable(Cell::new(0, 0)));
        assert!(!map.is_navigable(Cell::new(1, 1)));
    }

    #[test]
    fn default_map_dimensions() {
        let map = NavMap::default_map();
        assert_eq!(map.height(), 58);
        assert_eq!(map.width(), 38);
        assert_eq!(map.cell_size_m(), 290.0);
        assert_eq!(map.zones().len(), 3);
    }

    #[test]
    fn zone_on_land_rejected() {
        let err = NavMap::parse("MAP 2 2 290\n1 1\n1 0\nZONE 1 1 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("zone cell not navigable"), "{msg}");
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn ragged_row_rejected() {
        let err = NavMap::parse("MAP 2 3 290\n1 1 1\n1 0\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn moves_displace_two_cells() {
        let map = open_water(20, 20);
        assert_eq!(
            map.apply_action(Cell::new(10, 10), Action::East),
            Some(Cell::new(10, 12))
        );
        assert_eq!(
            map.apply_action(Cell::new(10, 10), Action::NorthWest),
            Some(Cell::new(8, 8))
        );
        // off the edge
        assert_eq!(map.apply_action(Cell::new(0, 0), Action::North), None);
        // one cell from the edge: intermediate ok, target out of bounds
        assert_eq!(map.apply_action(Cell::new(1, 0), Action::North), None);
    }

    #[test]
    fn blocked_by_target_and_intermediate_land() {
        // 5x5 water with a single land cell; checked against a hand-walked rule
        let mut nav = vec![true; 25];
        nav[2 * 5 + 2] = false; // (2,2)
        let map = NavMap::from_parts(5, 5, 290.0, nav, vec![]).unwrap();

        // target is land
        assert_eq!(map.apply_action(Cell::new(2, 0), Action::East), None);
        // intermediate is land, target water
        assert_eq!(map.apply_action(Cell::new(2, 1), Action::East), None);
        assert_eq!(map.apply_action(Cell::new(0, 0), Action::SouthEast), None);

        // exhaustive check against an independent feasibility rule
        for row in 0..5usize {
            for col in 0..5usize {
                let from = Cell::new(row, col);
                if !map.is_navigable(from) {
                    continue;
                }
                for action in Action::ALL {
                    let (dr, dc) = action.delta();
                    let mid = (row as i64 + dr, col as i64 + dc);
                    let tgt = (row as i64 + 2 * dr, col as i64 + 2 * dc);
                    let ok = |(r, c): (i64, i64)| {
                        r >= 0 && r < 5 && c >= 0 && c < 5 && !(r == 2 && c == 2)
                    };
                    let expect = if ok(mid) && ok(tgt) {
                        Some(Cell::new(tgt.0 as usize, tgt.1 as usize))
                    } else {
                        None
                    };
                    assert_eq!(map.apply_action(from, action), expect, "{from} {action}");
                }
            }
        }
    }

    #[test]
    fn metric_distances() {
        let map = open_water(10, 10);
        assert_eq!(map.distance_m(Cell::new(0, 0), Cell::new(0, 0)), 0.0);
        assert_eq!(map.distance_m(Cell::new(0, 0), Cell::new(0, 2)), 580.0);
        assert_eq!(map.distance_m(Cell::new(0, 0), Cell::new(3, 4)), 1450.0);
    }

    #[test]
    fn disk_membership() {
        let map = open_water(21, 21);
        let center = Cell::new(10, 10);
        assert_eq!(map.disk(center, 0.0), vec![center]);

        let unit = map.disk(center, 290.0);
        assert_eq!(unit.len(), 5); // center + 4 orthogonal neighbours

        // radius 1450 m = 5 cells; verified by a brute-force scan
        let disk = map.disk(center, 1450.0);
        let brute: Vec<Cell> = (0..21)
            .flat_map(|r| (0..21).map(move |c| Cell::new(r, c)))
            .filter(|&cell| map.distance_m(center, cell) <= 1450.0)
            .collect();
        assert_eq!(disk.len(), 81);
        assert_eq!(disk, brute);
    }

    #[test]
    fn disk_monotone_in_radius() {
        let map = NavMap::default_map();
        let center = Cell::new(20, 18);
        let small = map.disk(center, 600.0);
        let large = map.disk(center, 1450.0);
        assert!(small.iter().all(|c| large.contains(c)));
    }

    #[test]
    fn feasible_actions_match_brute_force() {
        let map = NavMap::default_map();
        for &from in map.navigable_cells() {
            for action in Action::ALL {
                let got = map.apply_action(from, action);
                let (dr, dc) = action.delta();
                let mid = (from.row as i64 + dr, from.col as i64 + dc);
                let tgt = (from.row as i64 + 2 * dr, from.col as i64 + 2 * dc);
                let nav = |(r, c): (i64, i64)| {
                    r >= 0 && c >= 0 && map.is_navigable(Cell::new(r as usize, c as usize))
                };
                let expect = if nav(mid) && nav(tgt) {
                    Some(Cell::new(tgt.0 as usize, tgt.1 as usize))
                } else {
                    None
                };
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn reverse_is_involutive() {
        for a in Action::ALL {
            assert_eq!(a.reverse().reverse(), a);
        }
    }
}
