//! Bounded fan-out over a slice of jobs.

use std::sync::mpsc;
use std::thread;

/// Applies `f` to every job on up to `workers` threads and returns results in
/// job order. Worker `w` handles jobs `w, w + n, w + 2n, ...` and sends each
/// result back over a channel; the caller's thread owns the output vector.
pub fn map_ordered<T, R, F>(jobs: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = workers.max(1).min(jobs.len().max(1));
    if workers == 1 {
        return jobs.iter().map(&f).collect();
    }

    let mut slots: Vec<Option<R>> = std::iter::repeat_with(|| None).take(jobs.len()).collect();
    let (tx, rx) = mpsc::channel();
    thread::scope(|scope| {
        for w in 0..workers {
            let tx = tx.clone();
            let f = &f;
            scope.spawn(move || {
                for i in (w..jobs.len()).step_by(workers) {
                    if tx.send((i, f(&jobs[i]))).is_err() {
                        return;
                    }
                }
            });
        }
        drop(tx);
        for (i, r) in rx {
            slots[i] = Some(r);
        }
    });
    slots
        .into_iter()
        .map(|r| r.expect("every job reports exactly once"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_job_order() {
        let jobs: Vec<u64> = (0..257).collect();
        for workers in [1, 2, 7, 64] {
            let out = map_ordered(&jobs, workers, |x| x * x);
            assert_eq!(out, jobs.iter().map(|x| x * x).collect::<Vec<_>>());
        }
    }

    #[test]
    fn empty_jobs() {
        let out: Vec<u8> = map_ordered(&[] as &[u8], 4, |x| *x);
        assert!(out.is_empty());
    }
}
