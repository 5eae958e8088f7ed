//! File formats, LP export and command implementations behind the `osp`
//! binary.

pub mod commands;
pub mod format;
pub mod lp;
