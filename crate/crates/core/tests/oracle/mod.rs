//! Brute-force reference move generator, written from the rule text against
//! a plain coordinate grid. Shares nothing with the engine except the rule
//! and board types used for input and comparison.

#![allow(dead_code)]

use boardforge::engine::{Board, Cell, Move, Piece, Player};
use boardforge::genome::{Capture, Chromosome, Movement, PieceType, RuleSet, StepSize};
use rand::Rng;

/// `(owner 0/1, type 1-6)` per square, `grid[row][col]`, row 0 = rank 1.
type Grid = [[Option<(u8, u8)>; 8]; 8];

/// Comparable form of a move: from, path, captures, conversion target.
pub type MoveKey = (u8, Vec<u8>, Vec<u8>, u8);

fn sq(r: i32, c: i32) -> u8 {
    (r * 8 + c) as u8
}

fn on_board(r: i32, c: i32) -> bool {
    (0..8).contains(&r) && (0..8).contains(&c)
}

fn directions(movement: Movement, forward: i32) -> Vec<(i32, i32)> {
    let f = forward;
    match movement {
        Movement::DiagFwd => vec![(f, 1), (f, -1)],
        Movement::DiagFwdBack => vec![(1, 1), (1, -1), (-1, 1), (-1, -1)],
        Movement::AllDirs => {
            let mut v = Vec::new();
            for dr in -1..=1 {
                for dc in -1..=1 {
                    if (dr, dc) != (0, 0) {
                        v.push((dr, dc));
                    }
                }
            }
            v
        }
        Movement::LShape => vec![
            (1, 2),
            (2, 1),
            (-1, 2),
            (-2, 1),
            (1, -2),
            (2, -1),
            (-1, -2),
            (-2, -1),
        ],
        Movement::StraightFwdBack => vec![(1, 0), (-1, 0)],
        Movement::StraightFwd => vec![(f, 0)],
    }
}

fn to_grid(board: &Board) -> Grid {
    let mut g: Grid = [[None; 8]; 8];
    for (i, slot) in board.iter().enumerate() {
        if let Some(p) = slot {
            let owner = if p.owner == Player::One { 0 } else { 1 };
            g[i / 8][i % 8] = Some((owner, p.kind.id()));
        }
    }
    g
}

fn enemy(g: &Grid, r: i32, c: i32, me: u8) -> bool {
    on_board(r, c) && matches!(g[r as usize][c as usize], Some((o, _)) if o != me)
}

fn empty(g: &Grid, r: i32, c: i32) -> bool {
    on_board(r, c) && g[r as usize][c as usize].is_none()
}

/// The two squares along the long arm of an L from `(r, c)`.
fn long_arm(r: i32, c: i32, dr: i32, dc: i32) -> [(i32, i32); 2] {
    if dr.abs() == 2 {
        let s = dr.signum();
        [(r + s, c), (r + 2 * s, c)]
    } else {
        let s = dc.signum();
        [(r, c + s), (r, c + 2 * s)]
    }
}

struct Ctx<'a> {
    rules: &'a RuleSet,
    me: u8,
    forward: i32,
    last_row: i32,
}

impl Ctx<'_> {
    fn convert(&self, kind: u8, to: u8) -> u8 {
        if i32::from(to / 8) == self.last_row {
            self.rules.pieces[usize::from(kind - 1)]
                .conversion
                .map_or(0, |t| t.id())
        } else {
            0
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn chains(
    ctx: &Ctx,
    g: &mut Grid,
    kind: u8,
    origin: u8,
    r: i32,
    c: i32,
    path: &mut Vec<u8>,
    caps: &mut Vec<u8>,
    out: &mut Vec<MoveKey>,
) {
    let pr = &ctx.rules.pieces[usize::from(kind - 1)];
    let mut jumped = false;
    for (dr, dc) in directions(pr.movement, ctx.forward) {
        if pr.movement == Movement::LShape {
            let (tr, tc) = (r + dr, c + dc);
            if !empty(g, tr, tc) {
                continue;
            }
            let victims: Vec<(i32, i32)> = long_arm(r, c, dr, dc)
                .into_iter()
                .filter(|&(vr, vc)| enemy(g, vr, vc, ctx.me))
                .collect();
            if victims.is_empty() {
                continue;
            }
            jumped = true;
            let saved: Vec<_> = victims
                .iter()
                .map(|&(vr, vc)| g[vr as usize][vc as usize].take())
                .collect();
            path.push(sq(tr, tc));
            for &(vr, vc) in &victims {
                caps.push(sq(vr, vc));
            }
            chains(ctx, g, kind, origin, tr, tc, path, caps, out);
            path.pop();
            caps.truncate(caps.len() - victims.len());
            for (&(vr, vc), s) in victims.iter().zip(saved) {
                g[vr as usize][vc as usize] = s;
            }
            continue;
        }
        let reach = if pr.step == StepSize::Multiple { 7 } else { 1 };
        for k in 1..=reach {
            let (vr, vc) = (r + k * dr, c + k * dc);
            let (lr, lc) = (vr + dr, vc + dc);
            let clear = (1..k).all(|j| empty(g, r + j * dr, c + j * dc));
            if !clear || !enemy(g, vr, vc, ctx.me) || !empty(g, lr, lc) {
                continue;
            }
            jumped = true;
            let saved = g[vr as usize][vc as usize].take();
            let before = path.len();
            for j in 1..k {
                path.push(sq(r + j * dr, c + j * dc));
            }
            path.push(sq(lr, lc));
            caps.push(sq(vr, vc));
            chains(ctx, g, kind, origin, lr, lc, path, caps, out);
            path.truncate(before);
            caps.pop();
            g[vr as usize][vc as usize] = saved;
        }
    }
    if !jumped && !caps.is_empty() {
        let to = *path.last().unwrap();
        out.push((origin, path.clone(), caps.clone(), ctx.convert(kind, to)));
    }
}

/// Every legal move for `side`, as sorted keys.
pub fn reference_moves(board: &Board, rules: &RuleSet, side: Player) -> Vec<MoveKey> {
    let grid = to_grid(board);
    let me = if side == Player::One { 0 } else { 1 };
    let ctx = Ctx {
        rules,
        me,
        forward: if side == Player::One { 1 } else { -1 },
        last_row: if side == Player::One { 7 } else { 0 },
    };
    let mut out = Vec::new();
    for r in 0..8 {
        for c in 0..8 {
            let Some((owner, kind)) = grid[r as usize][c as usize] else {
                continue;
            };
            if owner != me {
                continue;
            }
            let origin = sq(r, c);
            let pr = &rules.pieces[usize::from(kind - 1)];
            for (dr, dc) in directions(pr.movement, ctx.forward) {
                if pr.movement == Movement::LShape {
                    let (tr, tc) = (r + dr, c + dc);
                    if !on_board(tr, tc) {
                        continue;
                    }
                    let t = sq(tr, tc);
                    if empty(&grid, tr, tc) {
                        let arm_hit = long_arm(r, c, dr, dc)
                            .into_iter()
                            .any(|(vr, vc)| enemy(&grid, vr, vc, me));
                        if pr.capture == Capture::StepInto || !arm_hit {
                            out.push((origin, vec![t], vec![], ctx.convert(kind, t)));
                        }
                    } else if enemy(&grid, tr, tc, me) && pr.capture == Capture::StepInto {
                        out.push((origin, vec![t], vec![t], ctx.convert(kind, t)));
                    }
                    continue;
                }
                let reach = if pr.step == StepSize::Multiple { 7 } else { 1 };
                for k in 1..=reach {
                    let (tr, tc) = (r + k * dr, c + k * dc);
                    if !on_board(tr, tc) || !(1..k).all(|j| empty(&grid, r + j * dr, c + j * dc)) {
                        continue;
                    }
                    let path: Vec<u8> = (1..=k).map(|j| sq(r + j * dr, c + j * dc)).collect();
                    let t = sq(tr, tc);
                    if empty(&grid, tr, tc) {
                        out.push((origin, path, vec![], ctx.convert(kind, t)));
                    } else if enemy(&grid, tr, tc, me) && pr.capture == Capture::StepInto {
                        out.push((origin, path, vec![t], ctx.convert(kind, t)));
                    }
                }
            }
            if pr.capture == Capture::StepOver {
                let mut g = grid;
                g[r as usize][c as usize] = None;
                chains(
                    &ctx,
                    &mut g,
                    kind,
                    origin,
                    r,
                    c,
                    &mut Vec::new(),
                    &mut Vec::new(),
                    &mut out,
                );
            }
        }
    }
    if rules.mandatory_capture && out.iter().any(|m| !m.2.is_empty()) {
        out.retain(|m| !m.2.is_empty());
    }
    out.sort();
    out
}

pub fn key_of(m: &Move) -> MoveKey {
    (
        m.from.index() as u8,
        m.path.iter().map(|c| c.index() as u8).collect(),
        m.captures.iter().map(|c| c.index() as u8).collect(),
        m.converts_to.map_or(0, |t| t.id()),
    )
}

pub fn engine_keys(moves: &[Move]) -> Vec<MoveKey> {
    let mut keys: Vec<MoveKey> = moves.iter().map(key_of).collect();
    keys.sort();
    keys
}

/// Random rule set, random position (density drawn per instance) and side.
pub fn random_instance<R: Rng>(rng: &mut R) -> (RuleSet, Board, Player) {
    let rules = Chromosome::random(rng)
        .decode()
        .expect("random chromosomes are valid");
    let density: f64 = rng.gen_range(0.05..0.7);
    let mut board: Board = [None; 64];
    for slot in board.iter_mut() {
        if rng.gen_bool(density) {
            let owner = if rng.gen_bool(0.5) {
                Player::One
            } else {
                Player::Two
            };
            let kind = PieceType::new(rng.gen_range(1..=6)).unwrap();
            *slot = Some(Piece { owner, kind, id: 0 });
        }
    }
    let side = if rng.gen_bool(0.5) {
        Player::One
    } else {
        Player::Two
    };
    (rules, board, side)
}

/// Compares engine and reference on `count` seeded instances; returns the
/// number of mismatches and a description of the first one.
pub fn compare_instances(seed: u64, count: usize) -> (usize, Option<String>) {
    use boardforge::engine::GameState;
    use boardforge::seed::rng_for;

    let mut rng = rng_for(seed);
    let mut mismatches = 0;
    let mut first = None;
    for i in 0..count {
        let (rules, board, side) = random_instance(&mut rng);
        let state = GameState::from_board(board, side, 0, &rules);
        let engine = engine_keys(&state.legal_moves(&rules));
        let reference = reference_moves(&board, &rules, side);
        if engine != reference {
            mismatches += 1;
            if first.is_none() {
                let only_engine: Vec<_> =
                    engine.iter().filter(|k| !reference.contains(k)).collect();
                let only_ref: Vec<_> = reference.iter().filter(|k| !engine.contains(k)).collect();
                first = Some(format!(
                    "instance {i}: rules {} side {side:?}; engine-only {only_engine:?}; reference-only {only_ref:?}",
                    rules.encode()
                ));
            }
        }
    }
    (mismatches, first)
}

pub fn cell(name: &str) -> Cell {
    name.parse().unwrap()
}
