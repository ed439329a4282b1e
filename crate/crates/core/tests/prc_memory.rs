//! Auxiliary memory of the projected random cut, measured with a counting
//! allocator. Kept to a single test so no other allocations interleave.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};

use hcut::algorithms::projected_random_cut;
use hcut::instances::gaussian_cloud;
use hcut::Seed;

struct Counting;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            let live = LIVE.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
            PEAK.fetch_max(live, Ordering::SeqCst);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        LIVE.fetch_sub(layout.size(), Ordering::SeqCst);
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

/// Peak bytes allocated on top of what was live when `f` started.
fn peak_extra<T>(f: impl FnOnce() -> T) -> (T, usize) {
    let base = LIVE.load(Ordering::SeqCst);
    PEAK.store(base, Ordering::SeqCst);
    let out = f();
    (out, PEAK.load(Ordering::SeqCst) - base)
}

#[test]
fn auxiliary_memory_is_linear_in_n_and_flat_in_d() {
    let mut per_point = Vec::new();
    for (n, d) in [(20_000, 8), (20_000, 256), (80_000, 8)] {
        let pts = gaussian_cloud(n, d, Seed(1)).unwrap();
        let input = n * d * 8;
        let (tree, extra) = peak_extra(|| projected_random_cut(&pts, Seed(2)).unwrap());
        assert_eq!(tree.n(), n);
        // The tree itself is part of the output, so it counts here too.
        let bytes = (extra - 8 * d) as f64 / n as f64;
        assert!(extra < input || d <= 8, "n={n} d={d}: {extra} bytes vs input {input}");
        per_point.push(bytes);
        drop(tree);
    }
    // Growing d 32-fold leaves the per-point cost unchanged.
    assert!((per_point[1] - per_point[0]).abs() < 1.0, "{per_point:?}");
    // Growing n 4-fold keeps the per-point cost within a small factor.
    assert!(per_point[2] < 1.5 * per_point[0], "{per_point:?}");
    assert!(per_point[0] < 400.0, "{per_point:?}");
}
