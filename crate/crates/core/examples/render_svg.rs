//! Writes SVG frames of a homotopy to the directory given as the first
//! argument (default `frames`).
use cube_shuffle::domains::{interleaved_pair_domain, standard_domain};
use cube_shuffle::rational::rat;
use cube_shuffle::render::Frame;
use cube_shuffle::shuffle::shuffle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "frames".into());
    std::fs::create_dir_all(&dir)?;
    let plan = shuffle(&interleaved_pair_domain(2)?, &standard_domain(2)?, &[])?;
    for (i, t) in (0..=8).map(|i| rat(i, 8)).enumerate() {
        let frame = Frame::of_schedule(plan.schedule(), &t, 32)?;
        let path = format!("{dir}/frame-{i:03}.svg");
        std::fs::write(&path, frame.to_svg(640))?;
        println!("{path}: t = {t}, {} rectangles", frame.cubes.len());
    }
    Ok(())
}
