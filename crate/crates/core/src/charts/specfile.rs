//! Surface-spec file format: structured UTF-8 text with `[surface]`,
//! `[end.i]`, `[cone.j]`, `[interior]` sections, `key = value` lines and
//! whitespace-separated numeric rows. Unknown keys are rejected.

use super::synth::{self, ConeSeed};
use super::{EndSpec, Interior, Perturbation, SurfaceSpec};
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Default)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    fn rows(&self, key: &str) -> Vec<(&str, usize)> {
        self.entries
            .iter()
            .filter(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
            .collect()
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Parse {
            line: self.line,
            msg: format!("section [{}] missing key '{}'", self.name, key),
        })
    }

    fn f64_of(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Error::Parse {
            line: self.line,
            msg: format!("key '{key}' is not a number: '{v}'"),
        })
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::Parse {
                line: self.line,
                msg: format!("key '{key}' is not a number: '{v}'"),
            }),
        }
    }

    fn usize_of(&self, key: &str) -> Result<usize> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Error::Parse {
            line: self.line,
            msg: format!("key '{key}' is not an integer: '{v}'"),
        })
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _, l) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse {
                    line: *l,
                    msg: format!("unknown key '{}' in section [{}]", k, self.name),
                });
            }
        }
        Ok(())
    }
}

fn parse_row(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad number '{t}' in row"),
            })
        })
        .collect()
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "unterminated section header".into(),
                });
            }
            sections.push(Section {
                name: line[1..line.len() - 1].trim().to_string(),
                line: line_no,
                entries: Vec::new(),
            });
        } else {
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 'key = value', got '{line}'"),
                });
            };
            let Some(sec) = sections.last_mut() else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "key before any section header".into(),
                });
            };
            sec.entries
                .push((k.trim().to_string(), v.trim().to_string(), line_no));
        }
    }
    Ok(sections)
}

/// Parse a surface-spec text into a validated `SurfaceSpec`.
pub fn parse_surface_spec(text: &str) -> Result<SurfaceSpec> {
    let sections = split_sections(text)?;
    let mut name = String::from("unnamed");
    let mut ends: BTreeMap<usize, &Section> = BTreeMap::new();
    let mut cones: BTreeMap<usize, &Section> = BTreeMap::new();
    let mut interior: Option<&Section> = None;

    for sec in &sections {
        if sec.name == "surface" {
            sec.check_keys(&["name"])?;
            if let Some(v) = sec.get("name") {
                name = v.to_string();
            }
        } else if let Some(rest) = sec.name.strip_prefix("end.") {
            let idx: usize = rest.parse().map_err(|_| Error::Parse {
                line: sec.line,
                msg: format!("bad end index '{rest}'"),
            })?;
            ends.insert(idx, sec);
        } else if let Some(rest) = sec.name.strip_prefix("cone.") {
            let idx: usize = rest.parse().map_err(|_| Error::Parse {
                line: sec.line,
                msg: format!("bad cone index '{rest}'"),
            })?;
            cones.insert(idx, sec);
        } else if sec.name == "interior" {
            interior = Some(sec);
        } else {
            return Err(Error::Parse {
                line: sec.line,
                msg: format!("unknown section [{}]", sec.name),
            });
        }
    }

    let mut end_specs = Vec::new();
    let mut axisym_a1 = None;
    for (_, sec) in &ends {
        sec.check_keys(&[
            "kind",
            "radius",
            "bump_amp",
            "bump_center",
            "bump_width",
            "pert_eps0",
            "pert_x",
            "pert_y",
            "pert_a1",
            "pert_a2",
            "pert_a3",
        ])?;
        let kind = sec.require("kind")?;
        let radius = sec.f64_of("radius")?;
        match kind {
            "cusp" => end_specs.push(EndSpec::Cusp { radius }),
            "regular" => {
                if sec.get("bump_amp").is_some() {
                    axisym_a1 = Some(synth::axisym_bump(
                        sec.f64_of("bump_amp")?,
                        sec.f64_or("bump_center", 0.6)?,
                        sec.f64_or("bump_width", 0.25)?,
                    ));
                }
                let perturbation = if sec.get("pert_x").is_some() {
                    let gx = parse_row(sec.require("pert_x")?, sec.line)?;
                    let gy = parse_row(sec.require("pert_y")?, sec.line)?;
                    let read_tab = |key: &str| -> Result<Vec<Vec<f64>>> {
                        let rows = sec.rows(key);
                        if rows.len() != gx.len() {
                            return Err(Error::Parse {
                                line: sec.line,
                                msg: format!(
                                    "{key}: expected {} rows (one per pert_x value), got {}",
                                    gx.len(),
                                    rows.len()
                                ),
                            });
                        }
                        rows.iter().map(|(r, l)| parse_row(r, *l)).collect()
                    };
                    let a1 = read_tab("pert_a1")?;
                    let a2 = read_tab("pert_a2")?;
                    let a3 = read_tab("pert_a3")?;
                    Some(Perturbation {
                        grid_x: gx,
                        grid_y: gy,
                        a1,
                        a2,
                        a3,
                        eps0: sec.f64_or("pert_eps0", 1.0)?,
                    })
                } else {
                    None
                };
                end_specs.push(EndSpec::Regular {
                    radius,
                    perturbation,
                });
            }
            other => {
                return Err(Error::Parse {
                    line: sec.line,
                    msg: format!("end kind must be 'cusp' or 'regular', got '{other}'"),
                })
            }
        }
    }

    let mut seeds = Vec::new();
    for (_, sec) in &cones {
        sec.check_keys(&["label", "n", "c", "x", "y", "h_amp", "epsilon"])?;
        let n = if let Some(nv) = sec.get("n") {
            nv.parse::<u32>().map_err(|_| Error::Parse {
                line: sec.line,
                msg: format!("cone order n must be an integer, got '{nv}'"),
            })?
        } else {
            let c = sec.f64_of("c")?;
            let n = (1.0 / c.sqrt()).round();
            if ((1.0 / (n * n)) - c).abs() > 1e-9 {
                return Err(Error::Parse {
                    line: sec.line,
                    msg: "general cone constants are specified via n for mesh interiors".into(),
                });
            }
            n as u32
        };
        seeds.push(ConeSeed {
            x: sec.f64_of("x")?,
            y: sec.f64_of("y")?,
            n,
            h_amp: sec.f64_or("h_amp", 0.0)?,
        });
    }

    let spec = match interior {
        None => {
            let s = SurfaceSpec {
                name,
                ends: end_specs,
                interior: Interior::None,
                cones: vec![],
                axisym_a1,
            };
            if !seeds.is_empty() {
                return Err(Error::Parse {
                    line: 1,
                    msg: "cone sections need a mesh interior".into(),
                });
            }
            s.validate()?;
            s
        }
        Some(sec) => {
            let kind = sec.require("kind")?;
            let s = match kind {
                "none" => {
                    sec.check_keys(&["kind"])?;
                    SurfaceSpec {
                        name,
                        ends: end_specs,
                        interior: Interior::None,
                        cones: vec![],
                        axisym_a1,
                    }
                }
                "cigar" => {
                    sec.check_keys(&["kind", "cap_len"])?;
                    let radius = end_specs
                        .first()
                        .map(|e| e.radius())
                        .unwrap_or(1.0);
                    let mut s =
                        synth::Cigar::new(radius, sec.f64_or("cap_len", 2.0)?).surface_spec();
                    s.name = name;
                    s
                }
                "rect_mesh" => {
                    sec.check_keys(&["kind", "width", "height", "nx", "ny", "warp_amp"])?;
                    let width = sec.f64_of("width")?;
                    let height = sec.f64_of("height")?;
                    let nx = sec.usize_of("nx")?;
                    let ny = sec.usize_of("ny")?;
                    let warp = sec.f64_or("warp_amp", 0.0)?;
                    let mut s = if !seeds.is_empty() {
                        synth::cone_rectangle(width, height, nx, ny, &seeds)
                    } else if warp != 0.0 {
                        synth::warped_patch(width, height, nx, ny, warp)
                    } else {
                        synth::flat_strip(width, height, nx, ny)
                    };
                    s.name = name;
                    s.ends = end_specs;
                    s.axisym_a1 = axisym_a1;
                    s
                }
                "disc_mesh" => {
                    sec.check_keys(&["kind", "radius", "rings", "segments"])?;
                    let radius = sec.f64_of("radius")?;
                    let rings = sec.usize_of("rings")?;
                    let segments = sec.usize_of("segments")?;
                    let (n, h_amp) = seeds
                        .first()
                        .map(|s| (s.n, s.h_amp))
                        .unwrap_or((2, 0.0));
                    let mut s = if seeds.is_empty() {
                        let mesh = super::TriMesh::disc(radius, rings, segments, |_, _| {
                            [[1.0, 0.0], [0.0, 1.0]]
                        });
                        SurfaceSpec {
                            name: name.clone(),
                            ends: vec![],
                            interior: Interior::TriMesh(mesh),
                            cones: vec![],
                            axisym_a1: None,
                        }
                    } else {
                        synth::cone_disc(radius, rings, segments, n, h_amp)
                    };
                    s.name = name;
                    s.ends = end_specs;
                    s.axisym_a1 = axisym_a1;
                    s
                }
                other => {
                    return Err(Error::Parse {
                        line: sec.line,
                        msg: format!("unknown interior kind '{other}'"),
                    })
                }
            };
            if matches!(s.interior, Interior::None | Interior::WarpedProfile(_)) && !seeds.is_empty()
            {
                return Err(Error::Parse {
                    line: sec.line,
                    msg: "cone sections need a mesh interior".into(),
                });
            }
            s.validate()?;
            s
        }
    };
    Ok(spec)
}

/// Load and parse a surface-spec file.
pub fn load_surface_spec(path: &std::path::Path) -> Result<SurfaceSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_surface_spec(&text)
}

/// Canonical demo spec texts, keyed by short name; the CLI can dump these and
/// the tests parse them.
pub fn example_spec_texts() -> Vec<(&'static str, String)> {
    vec![
        (
            "free-cylinder",
            "[surface]\nname = free-cylinder\n\n[end.1]\nkind = cusp\nradius = 1.0\n\n\
             [end.2]\nkind = regular\nradius = 1.0\n\n[interior]\nkind = none\n"
                .to_string(),
        ),
        (
            "warped-cylinder",
            "[surface]\nname = warped-cylinder\n\n[end.1]\nkind = cusp\nradius = 1.0\n\n\
             [end.2]\nkind = regular\nradius = 1.0\nbump_amp = 0.15\nbump_center = 0.6\n\
             bump_width = 0.25\n\n[interior]\nkind = none\n"
                .to_string(),
        ),
        (
            "cigar",
            "[surface]\nname = cigar\n\n[end.1]\nkind = cusp\nradius = 1.0\n\n\
             [interior]\nkind = cigar\ncap_len = 2.0\n"
                .to_string(),
        ),
        (
            "cone-demo",
            "[surface]\nname = cone-demo\n\n[end.1]\nkind = cusp\nradius = 1.0\n\n\
             [interior]\nkind = rect_mesh\nwidth = 2.0\nheight = 1.0\nnx = 97\nny = 49\n\n\
             [cone.1]\nlabel = p1\nn = 3\nx = 1.0\ny = 0.5\nh_amp = 0.2\nepsilon = 0.4\n"
                .to_string(),
        ),
        (
            "flat-demo",
            "[surface]\nname = flat-demo\n\n[end.1]\nkind = cusp\nradius = 1.0\n\n\
             [interior]\nkind = rect_mesh\nwidth = 2.0\nheight = 1.0\nnx = 97\nny = 49\n"
                .to_string(),
        ),
    ]
}
