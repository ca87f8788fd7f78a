//! C ABI over `weldkit`.
//!
//! Every fallible function returns a [`WkStatus`]; on failure a message is
//! kept per thread and can be read with [`wk_last_error_message`]. Models and
//! region tables are opaque handles released with their `_free` function.
//! Panics never cross the boundary; they surface as `WK_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use weldkit::dataset::embedded_table2;
use weldkit::imgeo::{self, CleanMode, GrayImage, ImageError, RegionFeatures, ScaleSpec};
use weldkit::regress::{
    self, load_model, save_model, Model, ModelError, ModelKind, Predict, TrainConfig,
};
use weldkit::{EvalReport, Matrix, MetricError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dataset = 3,
    Model = 4,
    Metric = 5,
    Image = 6,
    Load = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WkModelKind {
    Ols = 0,
    Robust = 1,
    Svr = 2,
    Forest = 3,
}

impl From<WkModelKind> for ModelKind {
    fn from(k: WkModelKind) -> Self {
        match k {
            WkModelKind::Ols => ModelKind::Ols,
            WkModelKind::Robust => ModelKind::Robust,
            WkModelKind::Svr => ModelKind::Svr,
            WkModelKind::Forest => ModelKind::Forest,
        }
    }
}

impl From<ModelKind> for WkModelKind {
    fn from(k: ModelKind) -> Self {
        match k {
            ModelKind::Ols => WkModelKind::Ols,
            ModelKind::Robust => WkModelKind::Robust,
            ModelKind::Svr => WkModelKind::Svr,
            ModelKind::Forest => WkModelKind::Forest,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WkCleanMode {
    Closing = 0,
    Opening = 1,
    None = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WkMetrics {
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub r2: f64,
}

/// One measured region; lengths in scaled units, areas in squared units,
/// orientation in degrees.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WkRegion {
    pub region_id: u32,
    pub pixel_count: u64,
    pub area: f64,
    pub equivalent_diameter: f64,
    pub orientation: f64,
    pub major_axis_length: f64,
    pub minor_axis_length: f64,
    pub perimeter: f64,
    pub centroid_x: f64,
    pub centroid_y: f64,
}

/// Opaque trained model.
pub struct WkModel {
    inner: Model,
}

/// Opaque table of measured regions.
pub struct WkRegions {
    inner: Vec<RegionFeatures>,
}

/// Pass as `threshold` to [`wk_analyze_gray`] to pick the level automatically.
pub const WK_THRESHOLD_AUTO: i32 = -1;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(WkStatus, String);

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let status = match e {
            ModelError::Load(_) | ModelError::VersionMismatch { .. } => WkStatus::Load,
            ModelError::Dataset(_) => WkStatus::Dataset,
            _ => WkStatus::Model,
        };
        Failure(status, e.to_string())
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure(WkStatus::Metric, e.to_string())
    }
}

impl From<ImageError> for Failure {
    fn from(e: ImageError) -> Self {
        Failure(WkStatus::Image, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(WkStatus::NullPointer, format!("{name} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(WkStatus::InvalidArgument, msg.into())
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> WkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            WkStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            WkStatus::Panic
        }
    }
}

/// # Safety
/// When `len > 0`, `p` must point to `len` readable elements.
unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or valid for writes of one `T`.
unsafe fn write_out<T>(p: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

/// Boxes `value` into `*out`; nothing is allocated when `out` is null.
///
/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// # Safety
/// `p` must be null or a live handle from this library.
unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn wk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Trains a model with default hyperparameters on a row-major feature block.
///
/// # Safety
/// `features` must point to `n_rows * n_features` doubles, `targets` to
/// `n_rows` doubles, and `out` must be writable. On success `*out` owns a new
/// handle to release with [`wk_model_free`].
#[no_mangle]
pub unsafe extern "C" fn wk_model_train(
    kind: WkModelKind,
    features: *const f64,
    n_rows: usize,
    n_features: usize,
    targets: *const f64,
    seed: u64,
    out: *mut *mut WkModel,
) -> WkStatus {
    guard(|| {
        let len = n_rows
            .checked_mul(n_features)
            .ok_or_else(|| invalid("n_rows * n_features overflows"))?;
        let x = slice(features, len, "features")?;
        let y = slice(targets, n_rows, "targets")?;
        if n_features == 0 {
            return Err(invalid("n_features must be at least 1"));
        }
        let matrix = Matrix::from_row_major(n_rows, n_features, x.to_vec())
            .map_err(|e| invalid(e.to_string()))?;
        let model = regress::train(kind.into(), &matrix, y, &seeded_config(seed))?;
        put_handle(out, WkModel { inner: model })
    })
}

/// Trains on all 27 rows of the embedded experimental table.
///
/// # Safety
/// `out` must be writable; see [`wk_model_train`].
#[no_mangle]
pub unsafe extern "C" fn wk_model_train_table2(
    kind: WkModelKind,
    seed: u64,
    out: *mut *mut WkModel,
) -> WkStatus {
    guard(|| {
        let data = embedded_table2();
        let targets = data
            .targets()
            .map_err(|e| Failure(WkStatus::Dataset, e.to_string()))?;
        let model = regress::train(
            kind.into(),
            &data.features(),
            &targets,
            &seeded_config(seed),
        )?;
        put_handle(out, WkModel { inner: model })
    })
}

fn seeded_config(seed: u64) -> TrainConfig {
    let mut cfg = TrainConfig::default();
    cfg.svr.seed = seed;
    cfg.forest.seed = seed;
    cfg
}

/// Parses a model file's JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wk_model_load(json: *const c_char, out: *mut *mut WkModel) -> WkStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Failure(WkStatus::Load, "model text is not UTF-8".into()))?;
        let model = load_model(text)?;
        put_handle(out, WkModel { inner: model })
    })
}

/// Serializes a model to JSON. Release the string with [`wk_string_free`].
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wk_model_save(model: *const WkModel, out: *mut *mut c_char) -> WkStatus {
    guard(|| {
        let m = handle(model, "model")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text =
            CString::new(save_model(&m.inner)).map_err(|_| invalid("model text contains NUL"))?;
        out.write(text.into_raw());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wk_model_kind(model: *const WkModel, out: *mut WkModelKind) -> WkStatus {
    guard(|| write_out(out, handle(model, "model")?.inner.kind().into(), "out"))
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wk_model_n_features(model: *const WkModel, out: *mut usize) -> WkStatus {
    guard(|| write_out(out, handle(model, "model")?.inner.n_features(), "out"))
}

/// Predicts one row of `n_features` values.
///
/// # Safety
/// `model` must be a live handle, `x` must point to `n_features` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wk_model_predict(
    model: *const WkModel,
    x: *const f64,
    n_features: usize,
    out: *mut f64,
) -> WkStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let row = slice(x, n_features, "x")?;
        write_out(out, m.inner.predict(row)?, "out")
    })
}

/// # Safety
/// `model` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wk_model_free(model: *mut WkModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// MAE, MSE, RMSE and R² of `predicted` against `actual`.
///
/// # Safety
/// Both arrays must hold `n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wk_evaluate(
    actual: *const f64,
    predicted: *const f64,
    n: usize,
    out: *mut WkMetrics,
) -> WkStatus {
    guard(|| {
        let a = slice(actual, n, "actual")?;
        let p = slice(predicted, n, "predicted")?;
        let EvalReport { mae, mse, rmse, r2 } = EvalReport::compute(a, p)?;
        write_out(out, WkMetrics { mae, mse, rmse, r2 }, "out")
    })
}

/// Runs threshold, cleanup, labeling and measurement on an 8-bit grayscale
/// raster. `threshold` is a level in 0..=255 (pixels `>=` it are
/// foreground) or [`WK_THRESHOLD_AUTO`].
///
/// # Safety
/// `pixels` must point to `width * height` bytes in row-major order and
/// `out` must be writable. Release the result with [`wk_regions_free`].
#[no_mangle]
pub unsafe extern "C" fn wk_analyze_gray(
    pixels: *const u8,
    width: u32,
    height: u32,
    scale: f64,
    threshold: i32,
    clean: WkCleanMode,
    out: *mut *mut WkRegions,
) -> WkStatus {
    guard(|| {
        let n = width as usize * height as usize;
        let px = slice(pixels, n, "pixels")?;
        let img = GrayImage::new(width, height, px.to_vec())?;
        let scale = ScaleSpec::new(scale)?;
        let level = match threshold {
            WK_THRESHOLD_AUTO => imgeo::threshold_otsu(&img)?,
            t => u8::try_from(t).map_err(|_| invalid(format!("threshold {t} outside 0..=255")))?,
        };
        let mode = match clean {
            WkCleanMode::Closing => CleanMode::Closing,
            WkCleanMode::Opening => CleanMode::Opening,
            WkCleanMode::None => CleanMode::None,
        };
        let mask = imgeo::clean_mask(&imgeo::threshold_manual(&img, level), mode);
        let regions = imgeo::region_features(&imgeo::label(&mask), scale)?;
        put_handle(out, WkRegions { inner: regions })
    })
}

/// # Safety
/// `regions` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wk_regions_count(regions: *const WkRegions, out: *mut usize) -> WkStatus {
    guard(|| write_out(out, handle(regions, "regions")?.inner.len(), "out"))
}

/// Copies region `index` (0-based, label order) into `out`.
///
/// # Safety
/// `regions` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wk_regions_get(
    regions: *const WkRegions,
    index: usize,
    out: *mut WkRegion,
) -> WkStatus {
    guard(|| {
        let r = handle(regions, "regions")?;
        let f = r.inner.get(index).ok_or_else(|| {
            invalid(format!(
                "region index {index} out of range ({} regions)",
                r.inner.len()
            ))
        })?;
        let region = WkRegion {
            region_id: f.region_id,
            pixel_count: f.pixel_count,
            area: f.area,
            equivalent_diameter: f.equivalent_diameter,
            orientation: f.orientation,
            major_axis_length: f.major_axis_length,
            minor_axis_length: f.minor_axis_length,
            perimeter: f.perimeter,
            centroid_x: f.centroid.0,
            centroid_y: f.centroid.1,
        };
        write_out(out, region, "out")
    })
}

/// # Safety
/// `regions` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wk_regions_free(regions: *mut WkRegions) {
    if !regions.is_null() {
        drop(Box::from_raw(regions));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn error_message_is_thread_local_and_cleared() {
        let status = unsafe { wk_model_predict(ptr::null(), ptr::null(), 0, ptr::null_mut()) };
        assert_eq!(status, WkStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(wk_last_error_message()) }
            .to_str()
            .unwrap()
            .to_owned();
        assert_eq!(msg, "model is null");
        std::thread::spawn(|| {
            let other = unsafe { CStr::from_ptr(wk_last_error_message()) };
            assert!(other.to_bytes().is_empty());
        })
        .join()
        .unwrap();

        let mut m = WkMetrics::default();
        let v = [1.0, 2.0, 3.0];
        assert_eq!(
            unsafe { wk_evaluate(v.as_ptr(), v.as_ptr(), 3, &mut m) },
            WkStatus::Ok
        );
        assert!(unsafe { CStr::from_ptr(wk_last_error_message()) }
            .to_bytes()
            .is_empty());
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(wk_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
