use std::path::{Path, PathBuf};
use std::process::Command;

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// The three documented CLI examples: name, arguments.
pub fn examples() -> Vec<(&'static str, Vec<String>)> {
    let g = golden_dir();
    let input = |f: &str| g.join(f).to_string_lossy().into_owned();
    vec![
        ("analyze_impulse", vec!["analyze".into(), "--input".into(), input("impulse.csv")]),
        (
            "recover_two_tap",
            vec!["recover".into(), "--m".into(), "0".into(), "--input".into(), input("two_tap_hole.csv")],
        ),
        ("estimate_band_zero", vec!["estimate-band".into(), "--input".into(), input("zero.csv")]),
    ]
}

/// Runs the binary and renders exit code, stdout and stderr as one transcript.
pub fn transcript(bin: &str, args: &[String]) -> String {
    let out = Command::new(bin).args(args).output().expect("binary runs");
    let stderr = String::from_utf8_lossy(&out.stderr).replace(&*golden_dir().to_string_lossy(), "<golden>");
    format!(
        "exit={}\n--- stdout\n{}--- stderr\n{}",
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout),
        stderr
    )
}

/// Compares against `golden/<name>.out`; `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(bin: &str, name: &str, args: &[String]) -> Result<(), String> {
    let first = transcript(bin, args);
    let second = transcript(bin, args);
    if first != second {
        return Err(format!("{name}: output differs between two runs"));
    }
    let path = golden_dir().join(format!("{name}.out"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &first).map_err(|e| e.to_string())?;
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == first {
        Ok(())
    } else {
        Err(format!("{name}: output differs from {}", path.display()))
    }
}
