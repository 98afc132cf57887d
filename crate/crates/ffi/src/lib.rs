//! C ABI over `nim-sierpinski`.
//!
//! Every fallible call returns an [`NsStatus`]; results go through out
//! pointers. Point sets and games are opaque handles owned by the caller and
//! released with their `_free` function. Strings returned by the library are
//! released with [`ns_string_free`].

use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use nim_sierpinski::cli::{generate, Method};
use nim_sierpinski::engine::{simulate, GameSession, Opponent, Player, SessionId, Status};
use nim_sierpinski::export::{write_pointset, ExportFormat};
use nim_sierpinski::fractal::{membership_recursive, Budget, IterationSpec, PointSet};
use nim_sierpinski::geometry::shadow;
use nim_sierpinski::nim::{nim_sum, optimal_move, Classification, Move, Position};
use nim_sierpinski::verify::verify_theorem;
use nim_sierpinski::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetExceeded = 3,
    IllegalMove = 4,
    WrongTurn = 5,
    TerminalGame = 6,
    BufferTooSmall = 7,
    Io = 8,
    Panic = 9,
}

impl From<Error> for NsStatus {
    fn from(e: Error) -> Self {
        match e.code() {
            "budget_exceeded" => NsStatus::BudgetExceeded,
            "illegal_move" => NsStatus::IllegalMove,
            "wrong_turn" => NsStatus::WrongTurn,
            "terminal_game" => NsStatus::TerminalGame,
            "io_error" => NsStatus::Io,
            _ => NsStatus::InvalidArgument,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsMethod {
    Recursive = 0,
    Filtered = 1,
    Stream = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsFormat {
    Csv = 0,
    Jsonl = 1,
    Obj = 2,
    Svg = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsOpponent {
    Random = 0,
    Perfect = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsGameStatus {
    InProgress = 0,
    HumanWon = 1,
    EngineWon = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsPlayer {
    Human = 0,
    Engine = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NsMove {
    pub pile_index: usize,
    pub new_size: u64,
}

impl From<Move> for NsMove {
    fn from(m: Move) -> Self {
        NsMove {
            pile_index: m.pile_index,
            new_size: m.new_size,
        }
    }
}

/// Opaque point set handle.
pub struct NsPointSet(PointSet);

/// Opaque game session handle.
pub struct NsGame(GameSession);

fn guard<F: FnOnce() -> Result<(), NsStatus>>(f: F) -> NsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => NsStatus::Panic,
    }
}

unsafe fn slice_arg<'a>(ptr: *const u64, len: usize) -> Result<&'a [u64], NsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(NsStatus::NullPointer);
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn position(ptr: *const u64, len: usize) -> Result<Position, NsStatus> {
    Ok(Position::new(slice_arg(ptr, len)?.to_vec())?)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), NsStatus> {
    if out.is_null() {
        return Err(NsStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(ptr: *const T) -> Result<&'a T, NsStatus> {
    ptr.as_ref().ok_or(NsStatus::NullPointer)
}

unsafe fn handle_mut<'a, T>(ptr: *mut T) -> Result<&'a mut T, NsStatus> {
    ptr.as_mut().ok_or(NsStatus::NullPointer)
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn ns_status_message(status: NsStatus) -> *const c_char {
    let msg: &'static std::ffi::CStr = match status {
        NsStatus::Ok => c"ok",
        NsStatus::NullPointer => c"null pointer argument",
        NsStatus::InvalidArgument => c"invalid argument",
        NsStatus::BudgetExceeded => c"enumeration budget exceeded",
        NsStatus::IllegalMove => c"illegal move",
        NsStatus::WrongTurn => c"not this player's turn",
        NsStatus::TerminalGame => c"game is over",
        NsStatus::BufferTooSmall => c"output buffer too small",
        NsStatus::Io => c"i/o error",
        NsStatus::Panic => c"internal panic",
    };
    msg.as_ptr()
}

/// Nim-sum of `len` values. `values` may be NULL when `len` is 0.
///
/// # Safety
/// `values` must point to `len` readable `uint64_t`s when `len > 0`.
#[no_mangle]
pub unsafe extern "C" fn ns_nim_sum(values: *const u64, len: usize, out: *mut u64) -> NsStatus {
    guard(|| write_out(out, nim_sum(slice_arg(values, len)?)))
}

/// Sets `*out_is_p` to true for a P-position (nim-sum zero).
///
/// # Safety
/// `piles` must point to `len` readable values; `out_is_p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_classify(piles: *const u64, len: usize, out_is_p: *mut bool) -> NsStatus {
    guard(|| {
        let p = position(piles, len)?;
        write_out(out_is_p, p.classify() == Classification::P)
    })
}

/// Winning move from an N-position. `*out_found` is false at a P-position and
/// `*out_move` is left untouched.
///
/// # Safety
/// `piles` must point to `len` readable values; both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_optimal_move(
    piles: *const u64,
    len: usize,
    out_move: *mut NsMove,
    out_found: *mut bool,
) -> NsStatus {
    guard(|| {
        let p = position(piles, len)?;
        if out_move.is_null() {
            return Err(NsStatus::NullPointer);
        }
        match optimal_move(&p) {
            Some(m) => {
                out_move.write(m.into());
                write_out(out_found, true)
            }
            None => write_out(out_found, false),
        }
    })
}

/// Membership in the demihypercube via high/low decomposition.
///
/// # Safety
/// `coords` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_membership_recursive(coords: *const u64, len: usize, out: *mut bool) -> NsStatus {
    guard(|| {
        let p = position(coords, len)?;
        write_out(out, membership_recursive(&p))
    })
}

/// Builds iteration `n` in dimension `d`. On success `*out` owns a new handle.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_pointset_generate(
    d: usize,
    n: u32,
    method: NsMethod,
    budget_exponent: u32,
    out: *mut *mut NsPointSet,
) -> NsStatus {
    guard(|| {
        if out.is_null() {
            return Err(NsStatus::NullPointer);
        }
        let method = match method {
            NsMethod::Recursive => Method::Recursive,
            NsMethod::Filtered => Method::Filtered,
            NsMethod::Stream => Method::Stream,
        };
        let ps = generate(IterationSpec::new(d, n)?, method, Budget::new(budget_exponent))?;
        out.write(Box::into_raw(Box::new(NsPointSet(ps))));
        Ok(())
    })
}

/// # Safety
/// `ps` must be a live handle from [`ns_pointset_generate`] or NULL.
#[no_mangle]
pub unsafe extern "C" fn ns_pointset_len(ps: *const NsPointSet) -> usize {
    ps.as_ref().map_or(0, |ps| ps.0.len())
}

/// # Safety
/// `ps` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ns_pointset_dim(ps: *const NsPointSet) -> usize {
    ps.as_ref().map_or(0, |ps| ps.0.dim())
}

/// # Safety
/// `ps` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn ns_pointset_exponent(ps: *const NsPointSet) -> u32 {
    ps.as_ref().map_or(0, |ps| ps.0.exponent())
}

/// Copies point `index` into `out_coords`, which must hold `capacity >= dim` values.
///
/// # Safety
/// `ps` must be a live handle; `out_coords` must have room for `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ns_pointset_get(
    ps: *const NsPointSet,
    index: usize,
    out_coords: *mut u64,
    capacity: usize,
) -> NsStatus {
    guard(|| {
        let ps = &handle(ps)?.0;
        let point = ps.get(index).ok_or(NsStatus::InvalidArgument)?;
        if out_coords.is_null() {
            return Err(NsStatus::NullPointer);
        }
        if capacity < point.len() {
            return Err(NsStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(point.as_ptr(), out_coords, point.len());
        Ok(())
    })
}

/// Renders the set in `format`. `*out` receives a string to release with
/// [`ns_string_free`].
///
/// # Safety
/// `ps` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_pointset_export(
    ps: *const NsPointSet,
    format: NsFormat,
    out: *mut *mut c_char,
) -> NsStatus {
    guard(|| {
        let ps = &handle(ps)?.0;
        if out.is_null() {
            return Err(NsStatus::NullPointer);
        }
        let format = match format {
            NsFormat::Csv => ExportFormat::Csv,
            NsFormat::Jsonl => ExportFormat::Jsonl,
            NsFormat::Obj => ExportFormat::Obj,
            NsFormat::Svg => ExportFormat::Svg,
        };
        let mut buf = Vec::new();
        write_pointset(ps, format, &mut buf)?;
        let s = CString::new(buf).map_err(|_| NsStatus::Io)?;
        out.write(s.into_raw());
        Ok(())
    })
}

/// # Safety
/// `ps` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_pointset_free(ps: *mut NsPointSet) {
    if !ps.is_null() {
        drop(Box::from_raw(ps));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Compares the recursive and filtered constructions of iteration `n`.
///
/// # Safety
/// Both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_verify_theorem(
    d: usize,
    n: u32,
    budget_exponent: u32,
    out_equal: *mut bool,
    out_cardinality: *mut u64,
) -> NsStatus {
    guard(|| {
        let report = verify_theorem(IterationSpec::new(d, n)?, Budget::new(budget_exponent))?;
        write_out(out_cardinality, report.cardinality_recursive)?;
        write_out(out_equal, report.passed())
    })
}

/// Sets `*out_all_ones` when every cell of the shadow along `axis` is hit once.
///
/// # Safety
/// `out_all_ones` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_shadow_all_ones(
    d: usize,
    n: u32,
    axis: usize,
    budget_exponent: u32,
    out_all_ones: *mut bool,
) -> NsStatus {
    guard(|| {
        let grid = shadow(IterationSpec::new(d, n)?, axis, Budget::new(budget_exponent))?;
        write_out(out_all_ones, grid.all_ones())
    })
}

/// Engine-first games against `opponent`, seeded for reproducibility.
///
/// # Safety
/// `piles` must point to `len` readable values; out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_simulate(
    piles: *const u64,
    len: usize,
    opponent: NsOpponent,
    trials: u64,
    seed: u64,
    out_engine_wins: *mut u64,
    out_engine_losses: *mut u64,
) -> NsStatus {
    guard(|| {
        let p = position(piles, len)?;
        let opponent = match opponent {
            NsOpponent::Random => Opponent::Random,
            NsOpponent::Perfect => Opponent::Perfect,
        };
        let tally = simulate(&p, opponent, trials, seed)?;
        write_out(out_engine_wins, tally.engine_wins)?;
        write_out(out_engine_losses, tally.engine_losses)
    })
}

/// Starts a game. When the engine moves first it does not move until
/// [`ns_game_engine_move`] is called.
///
/// # Safety
/// `piles` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_game_new(
    piles: *const u64,
    len: usize,
    human_first: bool,
    out: *mut *mut NsGame,
) -> NsStatus {
    guard(|| {
        if out.is_null() {
            return Err(NsStatus::NullPointer);
        }
        let p = position(piles, len)?;
        let game = GameSession::new_game(SessionId::new("ffi"), p, human_first)?;
        out.write(Box::into_raw(Box::new(NsGame(game))));
        Ok(())
    })
}

/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_game_apply_human_move(game: *mut NsGame, m: NsMove) -> NsStatus {
    guard(|| {
        handle_mut(game)?
            .0
            .apply_human_move(Move::new(m.pile_index, m.new_size))?;
        Ok(())
    })
}

/// # Safety
/// `game` must be a live handle; `out_move` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_game_engine_move(game: *mut NsGame, out_move: *mut NsMove) -> NsStatus {
    guard(|| {
        let game = handle_mut(game)?;
        if out_move.is_null() {
            return Err(NsStatus::NullPointer);
        }
        let m = game.0.engine_move()?;
        out_move.write(m.into());
        Ok(())
    })
}

/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_game_status(game: *const NsGame, out: *mut NsGameStatus) -> NsStatus {
    guard(|| {
        let status = match handle(game)?.0.status() {
            Status::InProgress => NsGameStatus::InProgress,
            Status::HumanWon => NsGameStatus::HumanWon,
            Status::EngineWon => NsGameStatus::EngineWon,
        };
        write_out(out, status)
    })
}

/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_game_to_move(game: *const NsGame, out: *mut NsPlayer) -> NsStatus {
    guard(|| {
        let player = match handle(game)?.0.to_move() {
            Player::Human => NsPlayer::Human,
            Player::Engine => NsPlayer::Engine,
        };
        write_out(out, player)
    })
}

/// Copies the pile sizes into `out_piles`. `*out_len` always receives the
/// pile count, so a short buffer can be resized and the call repeated.
///
/// # Safety
/// `game` must be a live handle; `out_piles` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ns_game_position(
    game: *const NsGame,
    out_piles: *mut u64,
    capacity: usize,
    out_len: *mut usize,
) -> NsStatus {
    guard(|| {
        let coords = handle(game)?.0.position().coords();
        write_out(out_len, coords.len())?;
        if capacity < coords.len() {
            return Err(NsStatus::BufferTooSmall);
        }
        if out_piles.is_null() {
            return Err(NsStatus::NullPointer);
        }
        ptr::copy_nonoverlapping(coords.as_ptr(), out_piles, coords.len());
        Ok(())
    })
}

/// # Safety
/// `game` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_game_free(game: *mut NsGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}
