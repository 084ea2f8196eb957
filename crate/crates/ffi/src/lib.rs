//! C ABI over `acka-core`.
//!
//! Configurations and runs are opaque handles created by `acka_config_*`
//! and `acka_run` and released with the matching `*_free`. Fallible calls
//! return an [`AckaStatus`]; after a failure, [`acka_last_error`] describes
//! it for the calling thread. The generated header is `include/acka.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use acka_core::adversary::AdversaryStrategy;
use acka_core::harness::{HarnessError, Preset, RunConfigFile, RunSummary};
use acka_core::noise::NoiseModel;
use acka_core::protocol::{run_protocol, ConfigError, NetworkConfig, ProtocolError, Roles, RunOutcome};
use acka_core::security::{build_report, SecurityInputs};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AckaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Simulation = 4,
    Parse = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AckaAdversaryKind {
    Honest = 0,
    AlwaysZ = 1,
    GuessKeygen = 2,
}

/// Opaque network configuration.
pub struct AckaConfig {
    inner: NetworkConfig,
}

/// Opaque finished run.
pub struct AckaRun {
    outcome: RunOutcome,
    summary: RunSummary,
    public: CString,
    private: CString,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AckaSummary {
    pub keygen: usize,
    pub verification: usize,
    pub verification_failed: usize,
    /// NaN without Verification rounds.
    pub pass_rate: f64,
    /// NaN without KeyGen rounds.
    pub keygen_agreement: f64,
    pub threshold: f64,
    pub accepted: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AckaSecurityReport {
    pub d_eff: f64,
    pub eta: f64,
    pub r_f: f64,
    pub eta_prime: f64,
    pub p_no_fail: f64,
    pub p_worst: f64,
    pub p_corrected: f64,
    pub h_worst: f64,
    pub h_corrected: f64,
    /// Meaningful only when `has_key_rate` is set.
    pub effective_key_rate: f64,
    pub has_key_rate: bool,
    /// Effective D below 2.
    pub degenerate_d: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(AckaStatus, String);

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(AckaStatus::InvalidConfig, e.to_string())
    }
}

impl From<ProtocolError> for Failure {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Config(c) => c.into(),
            other => Failure(AckaStatus::Simulation, other.to_string()),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let status = match e {
            HarnessError::Config(_) => AckaStatus::InvalidConfig,
            HarnessError::Protocol(_) => AckaStatus::Simulation,
            _ => AckaStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AckaStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AckaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            AckaStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(AckaStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn boxed_config(inner: NetworkConfig, out: &mut *mut AckaConfig) {
    *out = Box::into_raw(Box::new(AckaConfig { inner }));
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn acka_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn acka_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a noiseless, honest configuration.
///
/// # Safety
/// `participants` must point to `num_participants` readable values and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acka_config_new(
    n: usize,
    sender: usize,
    participants: *const usize,
    num_participants: usize,
    d: f64,
    rounds: usize,
    seed: u64,
    out: *mut *mut AckaConfig,
) -> AckaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if participants.is_null() && num_participants > 0 {
            return Err(null("participants"));
        }
        let parts = if num_participants == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(participants, num_participants)
        };
        let cfg = NetworkConfig::new(Roles::new(n, sender, parts)?, d, rounds, seed);
        cfg.validate()?;
        boxed_config(cfg, out);
        Ok(())
    })
}

/// Creates a configuration from a preset label `'A'`..`'F'`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acka_config_from_preset(
    label: c_char,
    d: f64,
    rounds: usize,
    seed: u64,
    out: *mut *mut AckaConfig,
) -> AckaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let preset: Preset = char::from(label as u8)
            .to_string()
            .parse()
            .map_err(|m| Failure(AckaStatus::InvalidArgument, m))?;
        let cfg = NetworkConfig::new(preset.roles(), d, rounds, seed);
        cfg.validate()?;
        boxed_config(cfg, out);
        Ok(())
    })
}

/// Parses a configuration file's text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acka_config_parse(text: *const c_char, out: *mut *mut AckaConfig) -> AckaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Failure(AckaStatus::Parse, "configuration is not UTF-8".into()))?;
        let file = RunConfigFile::parse(text)?;
        boxed_config(file.config, out);
        Ok(())
    })
}

/// Sets global white noise with the given target fidelity (1 = noiseless).
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn acka_config_set_fidelity(config: *mut AckaConfig, fidelity: f64) -> AckaStatus {
    guard(|| {
        let cfg = out_ptr(config, "config")?;
        let noise = NoiseModel::from_fidelity(fidelity);
        noise.p_mix(cfg.inner.roles.n()).map_err(ConfigError::from)?;
        cfg.inner.noise = noise;
        Ok(())
    })
}

/// Makes non-participant `party` an adversary. `p_guess` is read only for
/// `GuessKeygen`.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn acka_config_set_adversary(
    config: *mut AckaConfig,
    party: usize,
    kind: AckaAdversaryKind,
    p_guess: f64,
) -> AckaStatus {
    guard(|| {
        let cfg = out_ptr(config, "config")?;
        let strategy = match kind {
            AckaAdversaryKind::Honest => AdversaryStrategy::Honest,
            AckaAdversaryKind::AlwaysZ => AdversaryStrategy::AlwaysZ,
            AckaAdversaryKind::GuessKeygen => AdversaryStrategy::GuessKeyGen { p_guess },
        };
        let mut next = cfg.inner.clone().with_adversary(party, strategy);
        next.validate()?;
        std::mem::swap(&mut cfg.inner, &mut next);
        Ok(())
    })
}

/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acka_config_free(config: *mut AckaConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the protocol. The configuration handle stays owned by the caller.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acka_run(config: *const AckaConfig, out: *mut *mut AckaRun) -> AckaStatus {
    guard(|| {
        let cfg = handle(config, "config")?;
        let out = out_ptr(out, "out")?;
        let outcome = run_protocol(&cfg.inner)?;
        let public = outcome.transcript.to_public();
        let private = outcome.transcript.to_private();
        let summary = RunSummary::from_views(&public, Some(&private));
        let text = |s: String| CString::new(s).expect("transcripts are ASCII");
        *out = Box::into_raw(Box::new(AckaRun {
            public: text(public.render()),
            private: text(private.render()),
            outcome,
            summary,
        }));
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acka_run_summary(run: *const AckaRun, out: *mut AckaSummary) -> AckaStatus {
    guard(|| {
        let run = handle(run, "run")?;
        let out = out_ptr(out, "out")?;
        let s = &run.summary;
        *out = AckaSummary {
            keygen: s.counts.keygen,
            verification: s.counts.verification,
            verification_failed: s.counts.verification_failed,
            pass_rate: s.pass_rate.unwrap_or(f64::NAN),
            keygen_agreement: s.keygen_agreement.unwrap_or(f64::NAN),
            threshold: s.threshold,
            accepted: s.accepted,
        };
        Ok(())
    })
}

/// Copies a key into `buf`. Slot 0 is the sender, slot `i` the `i`-th
/// participant in ascending index order. `*len` receives the key length;
/// pass a NULL `buf` to query it. Each byte is 0 or 1.
///
/// # Safety
/// `run` must be a live handle, `len` writable, and `buf` NULL or writable
/// for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn acka_run_key(
    run: *const AckaRun,
    slot: usize,
    buf: *mut u8,
    capacity: usize,
    len: *mut usize,
) -> AckaStatus {
    guard(|| {
        let run = handle(run, "run")?;
        let len = out_ptr(len, "len")?;
        let key = match slot {
            0 => &run.outcome.sender_key,
            i => run.outcome.participant_keys.get(i - 1).ok_or_else(|| {
                Failure(
                    AckaStatus::InvalidArgument,
                    format!("key slot {i} out of range (0..={})", run.outcome.participant_keys.len()),
                )
            })?,
        };
        *len = key.len();
        if buf.is_null() {
            return Ok(());
        }
        if capacity < key.len() {
            return Err(Failure(
                AckaStatus::InvalidArgument,
                format!("buffer of {capacity} bytes too small for key of {}", key.len()),
            ));
        }
        ptr::copy_nonoverlapping(key.as_ptr(), buf, key.len());
        Ok(())
    })
}

/// Public transcript text, owned by the run handle.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acka_run_public_transcript(run: *const AckaRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.public.as_ptr())
}

/// Sender-private transcript text, owned by the run handle.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acka_run_private_transcript(run: *const AckaRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.private.as_ptr())
}

/// # Safety
/// `run` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acka_run_free(run: *mut AckaRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Security figures for the given counts. A negative or NaN `raw_rate`
/// means no rate is known.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acka_security_report(
    num_keygen: usize,
    num_verification: usize,
    num_failed: usize,
    fidelity: f64,
    raw_rate: f64,
    out: *mut AckaSecurityReport,
) -> AckaStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let r = build_report(&SecurityInputs {
            num_keygen,
            num_verification,
            num_verification_failed: num_failed,
            fidelity,
            raw_rate: (raw_rate >= 0.0).then_some(raw_rate),
        })
        .map_err(|e| Failure(AckaStatus::InvalidArgument, e.to_string()))?;
        *out = AckaSecurityReport {
            d_eff: r.d_eff,
            eta: r.eta,
            r_f: r.r_f,
            eta_prime: r.eta_prime,
            p_no_fail: r.p_no_fail,
            p_worst: r.p_worst,
            p_corrected: r.p_corrected,
            h_worst: r.h_worst,
            h_corrected: r.h_corrected,
            effective_key_rate: r.effective_key_rate.unwrap_or(0.0),
            has_key_rate: r.effective_key_rate.is_some(),
            degenerate_d: !r.warnings.is_empty(),
        };
        Ok(())
    })
}
