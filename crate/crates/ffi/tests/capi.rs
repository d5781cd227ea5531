use std::ffi::{c_void, CStr, CString};
use std::ptr;

use discrete_hdr_ffi::*;

unsafe fn parse(spec: &str) -> *mut HdrDistribution {
    let spec = CString::new(spec).unwrap();
    let mut dist = ptr::null_mut();
    assert_eq!(
        hdr_distribution_parse(spec.as_ptr(), &mut dist),
        HdrStatus::Ok
    );
    dist
}

unsafe fn last_error() -> String {
    let p = hdr_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn elements(region: *const HdrRegion) -> Vec<i64> {
    let mut n = 0;
    assert_eq!(
        hdr_region_elements(region, ptr::null_mut(), 0, &mut n),
        if hdr_region_size(region) == 0 {
            HdrStatus::Ok
        } else {
            HdrStatus::BufferTooSmall
        }
    );
    let mut buf = vec![0i64; n];
    assert_eq!(
        hdr_region_elements(region, buf.as_mut_ptr(), buf.len(), &mut n),
        HdrStatus::Ok
    );
    buf
}

#[test]
fn binomial_round_trip() {
    unsafe {
        let dist = parse("binom(10, 0.5)");
        let mut region = ptr::null_mut();
        assert_eq!(hdr_compute(dist, 0.9, 0, &mut region), HdrStatus::Ok);
        assert_eq!(hdr_region_size(region), 6);
        assert_eq!(elements(region), vec![2, 3, 4, 5, 6, 7]);
        assert!((hdr_region_coverage(region) - 0.9345703125).abs() < 1e-12);

        let mut n = 0;
        let mut var = [0i64; 2];
        assert_eq!(
            hdr_region_variation_set(region, var.as_mut_ptr(), 2, &mut n),
            HdrStatus::Ok
        );
        assert_eq!((n, var), (2, [2, 8]));

        let mut ok = false;
        assert_eq!(hdr_region_certify(dist, region, &mut ok), HdrStatus::Ok);
        assert!(ok);

        let json = hdr_region_render_json(region);
        let value: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(value["region_size"], 6);
        hdr_string_free(json);

        hdr_region_free(region);
        hdr_distribution_free(dist);
    }
}

#[test]
fn table_distribution() {
    unsafe {
        let xs = [-2i64, 0, 5];
        let ms = [0.2, 0.5, 0.3];
        let mut dist = ptr::null_mut();
        assert_eq!(
            hdr_distribution_from_table(xs.as_ptr(), ms.as_ptr(), 3, &mut dist),
            HdrStatus::Ok
        );
        let mut m = 0.0;
        assert_eq!(hdr_distribution_mass(dist, 5, &mut m), HdrStatus::Ok);
        assert_eq!(m, 0.3);
        assert_eq!(hdr_distribution_mass(dist, 1, &mut m), HdrStatus::Ok);
        assert_eq!(m, 0.0);

        let mut region = ptr::null_mut();
        assert_eq!(hdr_compute(dist, 0.0, 0, &mut region), HdrStatus::Ok);
        assert_eq!(hdr_region_size(region), 0);
        assert_eq!(elements(region), Vec::<i64>::new());
        let text = hdr_region_render_text(region);
        assert!(CStr::from_ptr(text).to_str().unwrap().contains("∅"));
        hdr_string_free(text);
        hdr_region_free(region);
        hdr_distribution_free(dist);

        let bad = [0.2, 0.5, 0.5];
        assert_eq!(
            hdr_distribution_from_table(xs.as_ptr(), bad.as_ptr(), 3, &mut dist),
            HdrStatus::InvalidMass
        );
        let dup = [1i64, 1, 2];
        assert_eq!(
            hdr_distribution_from_table(dup.as_ptr(), ms.as_ptr(), 3, &mut dist),
            HdrStatus::ParseError
        );
    }
}

unsafe extern "C" fn geometric_half(x: i64, _: *mut c_void) -> f64 {
    if x < 0 {
        0.0
    } else {
        0.5f64.powi(x as i32 + 1)
    }
}

unsafe extern "C" fn negative_at_three(x: i64, _: *mut c_void) -> f64 {
    if x == 3 {
        -0.1
    } else {
        0.25
    }
}

#[test]
fn callback_distribution() {
    unsafe {
        let mut dist = ptr::null_mut();
        assert_eq!(
            hdr_distribution_from_callback(
                Some(geometric_half),
                ptr::null_mut(),
                true,
                0,
                false,
                0,
                &mut dist
            ),
            HdrStatus::Ok
        );
        let mut region = ptr::null_mut();
        assert_eq!(hdr_compute(dist, 0.9, 0, &mut region), HdrStatus::Ok);
        assert_eq!(elements(region), vec![0, 1, 2, 3]);
        hdr_region_free(region);
        hdr_distribution_free(dist);

        assert_eq!(
            hdr_distribution_from_callback(
                Some(negative_at_three),
                ptr::null_mut(),
                true,
                0,
                true,
                4,
                &mut dist
            ),
            HdrStatus::Ok
        );
        assert_eq!(
            hdr_compute(dist, 0.9, 0, &mut region),
            HdrStatus::InvalidMass
        );
        assert!(last_error().contains('3'));
        hdr_distribution_free(dist);

        assert_eq!(
            hdr_distribution_from_callback(None, ptr::null_mut(), false, 0, false, 0, &mut dist),
            HdrStatus::NullPointer
        );
        assert_eq!(
            hdr_distribution_from_callback(
                Some(geometric_half),
                ptr::null_mut(),
                true,
                5,
                true,
                1,
                &mut dist
            ),
            HdrStatus::InvalidArgument
        );
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut dist = ptr::null_mut();
        let spec = CString::new("pois(-1)").unwrap();
        assert_eq!(
            hdr_distribution_parse(spec.as_ptr(), &mut dist),
            HdrStatus::ParseError
        );
        assert!(dist.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(
            hdr_distribution_parse(ptr::null(), &mut dist),
            HdrStatus::NullPointer
        );
        assert_eq!(
            hdr_distribution_parse(spec.as_ptr(), ptr::null_mut()),
            HdrStatus::NullPointer
        );

        let dist = parse("pois(1000)");
        let mut region = ptr::null_mut();
        assert_eq!(
            hdr_compute(dist, 0.99, 50, &mut region),
            HdrStatus::NotTerminated
        );
        assert!(region.is_null());
        assert_eq!(
            hdr_compute(dist, 1.5, 0, &mut region),
            HdrStatus::InvalidArgument
        );
        assert_eq!(
            hdr_compute(ptr::null(), 0.5, 0, &mut region),
            HdrStatus::NullPointer
        );
        hdr_distribution_free(dist);

        // A successful call clears the previous message.
        let dist = parse("point(4)");
        assert!(hdr_last_error_message().is_null());
        hdr_distribution_free(dist);

        assert_eq!(hdr_region_size(ptr::null()), 0);
        assert!(hdr_region_coverage(ptr::null()).is_nan());
        assert!(hdr_region_render_text(ptr::null()).is_null());
        hdr_region_free(ptr::null_mut());
        hdr_distribution_free(ptr::null_mut());
        hdr_string_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(hdr_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
