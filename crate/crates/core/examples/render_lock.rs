//! Writes SVG frames of the lock in its three states to a directory
//! (default `lock_frames`).

use linklogic::cli::render::{lock_frames, write_frames};
use linklogic::kinematics::LockGeometry;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "lock_frames".into());
    let frames = lock_frames(&LockGeometry::default());
    for path in write_frames(dir.as_ref(), &frames).expect("writable directory") {
        println!("{}", path.display());
    }
}
