use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, Array3, ArrayD, Axis, IxDyn};

use crate::{Error, Execution, Result, C64};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Mode product `Y = X ×_axis M`: every fibre of `x` along `axis` is replaced by `M · fibre`.
///
/// `m` is `J × N_axis`; the output has `J` in place of `N_axis`.
pub fn mode_product(x: &ArrayD<C64>, m: &Array2<C64>, axis: usize, exec: Execution) -> Result<ArrayD<C64>> {
    let shape = x.shape().to_vec();
    if axis >= shape.len() {
        return Err(Error::shape(format!("axis {axis} out of range for a {}-D signal", shape.len())));
    }
    let n = shape[axis];
    if m.ncols() != n {
        return Err(Error::shape(format!("factor matrix has {} columns, axis {axis} has length {n}", m.ncols())));
    }
    let j = m.nrows();
    let prefix: usize = shape[..axis].iter().product();
    let suffix: usize = shape[axis + 1..].iter().product();

    let xs = x.as_standard_layout();
    let x3 = xs.view().into_shape_with_order((prefix, n, suffix)).expect("standard layout");
    let mut out = Array3::<C64>::zeros((prefix, j, suffix));

    if suffix == 1 {
        // last axis: (prefix × n) · Mᵀ
        let x2 = x3.index_axis(Axis(2), 0);
        let mut o2 = out.index_axis_mut(Axis(2), 0);
        let chunk = chunk_len(prefix, exec);
        run_chunks(&mut o2, Axis(0), chunk, exec, |start, mut block| {
            let rows = x2.slice(ndarray::s![start..start + block.nrows(), ..]);
            general_mat_mul(ONE, &rows, &m.t(), ZERO, &mut block);
        });
    } else if prefix == 1 {
        let x2 = x3.index_axis(Axis(0), 0);
        let mut o2 = out.index_axis_mut(Axis(0), 0);
        let chunk = chunk_len(suffix, exec);
        run_chunks(&mut o2, Axis(1), chunk, exec, |start, mut block| {
            let cols = x2.slice(ndarray::s![.., start..start + block.ncols()]);
            general_mat_mul(ONE, m, &cols, ZERO, &mut block);
        });
    } else {
        let body = |p: usize, mut block: ndarray::ArrayViewMut2<C64>| {
            general_mat_mul(ONE, m, &x3.index_axis(Axis(0), p), ZERO, &mut block);
        };
        #[cfg(feature = "parallel")]
        if exec.is_parallel() {
            use rayon::prelude::*;
            out.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(p, b)| body(p, b));
            return reshape(out, &shape, axis, j);
        }
        for (p, b) in out.axis_iter_mut(Axis(0)).enumerate() {
            body(p, b);
        }
    }
    reshape(out, &shape, axis, j)
}

fn reshape(out: Array3<C64>, shape: &[usize], axis: usize, j: usize) -> Result<ArrayD<C64>> {
    let mut dims = shape.to_vec();
    dims[axis] = j;
    out.into_shape_with_order(IxDyn(&dims)).map_err(|e| Error::shape(e.to_string()))
}

fn chunk_len(len: usize, exec: Execution) -> usize {
    if !exec.is_parallel() {
        return len.max(1);
    }
    #[cfg(feature = "parallel")]
    {
        let pieces = rayon::current_num_threads() * 4;
        return len.div_ceil(pieces).max(16);
    }
    #[allow(unreachable_code)]
    len.max(1)
}

/// Splits `target` into chunks along `axis` and runs `f(start, chunk)` on each.
fn run_chunks<F>(target: &mut ndarray::ArrayViewMut2<C64>, axis: Axis, chunk: usize, exec: Execution, f: F)
where
    F: Fn(usize, ndarray::ArrayViewMut2<C64>) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        target
            .axis_chunks_iter_mut(axis, chunk)
            .into_par_iter()
            .enumerate()
            .for_each(|(k, b)| f(k * chunk, b));
        return;
    }
    let _ = exec;
    for (k, b) in target.axis_chunks_iter_mut(axis, chunk).enumerate() {
        f(k * chunk, b);
    }
}
