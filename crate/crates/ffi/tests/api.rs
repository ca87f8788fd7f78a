use std::ffi::{CStr, CString};
use std::ptr;

use weldkit::dataset::embedded_table2;
use weldkit::regress::{train, Predict, TrainConfig};
use weldkit::ModelKind;
use weldkit_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(wk_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn table2_model(kind: WkModelKind) -> *mut WkModel {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { wk_model_train_table2(kind, 0, &mut m) },
        WkStatus::Ok
    );
    assert!(!m.is_null());
    m
}

#[test]
fn table2_predictions_match_library() {
    let data = embedded_table2();
    let y = data.targets().unwrap();
    for (kind, wk) in [
        (ModelKind::Ols, WkModelKind::Ols),
        (ModelKind::Robust, WkModelKind::Robust),
        (ModelKind::Svr, WkModelKind::Svr),
        (ModelKind::Forest, WkModelKind::Forest),
    ] {
        let reference = train(kind, &data.features(), &y, &TrainConfig::default()).unwrap();
        let m = table2_model(wk);
        let x = [1500.0, 20.0, 120.0];
        let mut got = f64::NAN;
        assert_eq!(
            unsafe { wk_model_predict(m, x.as_ptr(), 3, &mut got) },
            WkStatus::Ok
        );
        assert_eq!(
            got.to_bits(),
            reference.predict(&x).unwrap().to_bits(),
            "{kind}"
        );

        let mut k = WkModelKind::Ols;
        assert_eq!(unsafe { wk_model_kind(m, &mut k) }, WkStatus::Ok);
        assert_eq!(k, wk);
        let mut p = 0usize;
        assert_eq!(unsafe { wk_model_n_features(m, &mut p) }, WkStatus::Ok);
        assert_eq!(p, 3);
        unsafe { wk_model_free(m) };
    }
}

#[test]
fn train_from_buffers_and_round_trip() {
    // depth = 1 + 2a - b
    let rows: Vec<[f64; 2]> = (0..12).map(|i| [i as f64, ((i * 7) % 5) as f64]).collect();
    let x: Vec<f64> = rows.iter().flatten().copied().collect();
    let y: Vec<f64> = rows.iter().map(|r| 1.0 + 2.0 * r[0] - r[1]).collect();
    let mut m = ptr::null_mut();
    let status =
        unsafe { wk_model_train(WkModelKind::Ols, x.as_ptr(), 12, 2, y.as_ptr(), 0, &mut m) };
    assert_eq!(status, WkStatus::Ok);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { wk_model_save(m, &mut json) }, WkStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { wk_model_load(json, &mut loaded) }, WkStatus::Ok);
    unsafe { wk_string_free(json) };

    let probe = [3.5, 1.25];
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        assert_eq!(wk_model_predict(m, probe.as_ptr(), 2, &mut a), WkStatus::Ok);
        assert_eq!(
            wk_model_predict(loaded, probe.as_ptr(), 2, &mut b),
            WkStatus::Ok
        );
    }
    assert_eq!(a.to_bits(), b.to_bits());
    assert!((a - (1.0 + 7.0 - 1.25)).abs() < 1e-9);
    unsafe {
        wk_model_free(m);
        wk_model_free(loaded);
    }
}

#[test]
fn error_codes() {
    let m = table2_model(WkModelKind::Ols);
    let mut out = 0.0;
    let short = [1500.0, 20.0];
    assert_eq!(
        unsafe { wk_model_predict(m, short.as_ptr(), 2, &mut out) },
        WkStatus::Model
    );
    assert!(
        last_error().contains("expects 3 features"),
        "{}",
        last_error()
    );
    let nan = [f64::NAN, 20.0, 120.0];
    assert_eq!(
        unsafe { wk_model_predict(m, nan.as_ptr(), 3, &mut out) },
        WkStatus::Model
    );
    assert_eq!(
        unsafe { wk_model_predict(m, ptr::null(), 3, &mut out) },
        WkStatus::NullPointer
    );
    assert_eq!(
        unsafe { wk_model_predict(m, [1500.0, 20.0, 120.0].as_ptr(), 3, ptr::null_mut()) },
        WkStatus::NullPointer
    );
    unsafe { wk_model_free(m) };

    // an untrained model cannot exist; the closest caller error is a null handle
    assert_eq!(
        unsafe { wk_model_predict(ptr::null(), short.as_ptr(), 2, &mut out) },
        WkStatus::NullPointer
    );

    let bad = CString::new("{\"format\":\"weldkit-model\"").unwrap();
    let mut loaded = ptr::null_mut();
    assert_eq!(
        unsafe { wk_model_load(bad.as_ptr(), &mut loaded) },
        WkStatus::Load
    );
    assert!(loaded.is_null());

    // three identical rows: singular design
    let x = [1.0; 9];
    let y = [1.0, 2.0, 3.0];
    let mut trained = ptr::null_mut();
    let status = unsafe {
        wk_model_train(
            WkModelKind::Ols,
            x.as_ptr(),
            3,
            3,
            y.as_ptr(),
            0,
            &mut trained,
        )
    };
    assert_ne!(status, WkStatus::Ok);
    assert!(trained.is_null());

    let mut metrics = WkMetrics::default();
    let flat = [2.0; 4];
    let pred = [1.0, 2.0, 3.0, 4.0];
    assert_eq!(
        unsafe { wk_evaluate(flat.as_ptr(), pred.as_ptr(), 4, &mut metrics) },
        WkStatus::Metric
    );
    assert!(last_error().contains("constant"), "{}", last_error());

    // freeing null is a no-op
    unsafe {
        wk_model_free(ptr::null_mut());
        wk_regions_free(ptr::null_mut());
        wk_string_free(ptr::null_mut());
    }
}

#[test]
fn evaluate_metrics() {
    let a = [1.0, 2.0, 3.0, 4.0];
    let p = [1.5, 2.0, 2.0, 4.0];
    let mut m = WkMetrics::default();
    assert_eq!(
        unsafe { wk_evaluate(a.as_ptr(), p.as_ptr(), 4, &mut m) },
        WkStatus::Ok
    );
    assert!((m.mae - 0.375).abs() < 1e-15);
    assert!((m.mse - 0.3125).abs() < 1e-15);
    assert!((m.rmse - 0.3125f64.sqrt()).abs() < 1e-15);
    assert!((m.r2 - (1.0 - 1.25 / 5.0)).abs() < 1e-15);
}

#[test]
fn analyze_two_squares() {
    // 4x4 bright square and a 2x2 one on a dark 12x8 field
    let (w, h) = (12u32, 8u32);
    let mut px = vec![20u8; (w * h) as usize];
    for y in 1..5 {
        for x in 1..5 {
            px[y * w as usize + x] = 220;
        }
    }
    for y in 5..7 {
        for x in 8..10 {
            px[y * w as usize + x] = 200;
        }
    }
    let mut regions = ptr::null_mut();
    let status =
        unsafe { wk_analyze_gray(px.as_ptr(), w, h, 0.5, 160, WkCleanMode::None, &mut regions) };
    assert_eq!(status, WkStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { wk_regions_count(regions, &mut n) }, WkStatus::Ok);
    assert_eq!(n, 2);

    let mut r = WkRegion::default();
    assert_eq!(unsafe { wk_regions_get(regions, 0, &mut r) }, WkStatus::Ok);
    assert_eq!((r.region_id, r.pixel_count), (1, 16));
    assert!((r.area - 4.0).abs() < 1e-12);
    assert!((r.centroid_x - 1.25).abs() < 1e-12 && (r.centroid_y - 1.25).abs() < 1e-12);
    assert_eq!(unsafe { wk_regions_get(regions, 1, &mut r) }, WkStatus::Ok);
    assert_eq!(r.pixel_count, 4);
    assert_eq!(
        unsafe { wk_regions_get(regions, 2, &mut r) },
        WkStatus::InvalidArgument
    );
    unsafe { wk_regions_free(regions) };

    let mut auto = ptr::null_mut();
    let status = unsafe {
        wk_analyze_gray(
            px.as_ptr(),
            w,
            h,
            0.5,
            WK_THRESHOLD_AUTO,
            WkCleanMode::Closing,
            &mut auto,
        )
    };
    assert_eq!(status, WkStatus::Ok);
    unsafe { wk_regions_free(auto) };
}

#[test]
fn analyze_errors() {
    let flat = [90u8; 16];
    let mut regions = ptr::null_mut();
    let auto = unsafe {
        wk_analyze_gray(
            flat.as_ptr(),
            4,
            4,
            1.0,
            WK_THRESHOLD_AUTO,
            WkCleanMode::None,
            &mut regions,
        )
    };
    assert_eq!(auto, WkStatus::Image);
    assert!(last_error().contains("degenerate"), "{}", last_error());
    let none = unsafe {
        wk_analyze_gray(
            flat.as_ptr(),
            4,
            4,
            1.0,
            200,
            WkCleanMode::None,
            &mut regions,
        )
    };
    assert_eq!(none, WkStatus::Image);
    let bad_level = unsafe {
        wk_analyze_gray(
            flat.as_ptr(),
            4,
            4,
            1.0,
            256,
            WkCleanMode::None,
            &mut regions,
        )
    };
    assert_eq!(bad_level, WkStatus::InvalidArgument);
    let bad_scale = unsafe {
        wk_analyze_gray(
            flat.as_ptr(),
            4,
            4,
            0.0,
            10,
            WkCleanMode::None,
            &mut regions,
        )
    };
    assert_eq!(bad_scale, WkStatus::Image);
    let zero = unsafe {
        wk_analyze_gray(
            flat.as_ptr(),
            0,
            4,
            1.0,
            10,
            WkCleanMode::None,
            &mut regions,
        )
    };
    assert_eq!(zero, WkStatus::Image);
    assert!(regions.is_null());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/weldkit.h");
    for name in [
        "wk_last_error_message",
        "wk_version",
        "wk_model_train",
        "wk_model_train_table2",
        "wk_model_load",
        "wk_model_save",
        "wk_string_free",
        "wk_model_kind",
        "wk_model_n_features",
        "wk_model_predict",
        "wk_model_free",
        "wk_evaluate",
        "wk_analyze_gray",
        "wk_regions_count",
        "wk_regions_get",
        "wk_regions_free",
        "typedef struct WkModel WkModel;",
        "typedef struct WkRegions WkRegions;",
        "WK_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
