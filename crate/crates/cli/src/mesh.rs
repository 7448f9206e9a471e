//! Triangle meshes of `n = 3` surfaces over a grid of the two non-height
//! coordinates, with curvature per vertex.

use std::io::Write;

use sepcurv::curvature::{sectional_oracle, sectional_special, PlaneSection};
use sepcurv::geometry::solve_height;
use sepcurv::{SeparableSurface, Tolerances};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub k_special: Vec<f64>,
    pub k_oracle: Vec<f64>,
    /// 0-based vertex indices, counter-clockwise in grid order.
    pub faces: Vec<[usize; 3]>,
}

/// Samples `resolution × resolution` grid nodes. Nodes whose height solve
/// or curvature evaluation fails are dropped; a grid cell with four
/// surviving corners gives two triangles, one with three gives one.
pub fn build_mesh(
    s: &SeparableSurface,
    ranges: [(f64, f64); 2],
    resolution: usize,
    bracket: (f64, f64),
    tol: &Tolerances<f64>,
) -> sepcurv::Result<Mesh> {
    if s.dim() != 3 {
        return Err(sepcurv::Error::Dimension {
            expected: 3,
            got: s.dim(),
        });
    }
    let axes: Vec<usize> = s.tangent_axes().collect();
    let (a, b) = (axes[0], axes[1]);
    let node = |(lo, hi): (f64, f64), k: usize| {
        if resolution == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * k as f64 / (resolution - 1) as f64
        }
    };
    let mut mesh = Mesh::default();
    let mut index = vec![None; resolution * resolution];
    for r in 0..resolution {
        for c in 0..resolution {
            let partial = [node(ranges[0], c), node(ranges[1], r)];
            let Ok(p) = solve_height(s, &partial, bracket, tol) else {
                continue;
            };
            let curv = sectional_special(s, &p, a, b, tol).and_then(|ks| {
                let sec = PlaneSection::coordinate(s, &p, a, b, tol)?;
                Ok((ks, sectional_oracle(s, &p, &sec, tol)?))
            });
            let Ok((ks, ko)) = curv else { continue };
            let x = p.coords();
            index[r * resolution + c] = Some(mesh.vertices.len());
            mesh.vertices.push([x[0], x[1], x[2]]);
            mesh.k_special.push(ks);
            mesh.k_oracle.push(ko);
        }
    }
    for r in 0..resolution.saturating_sub(1) {
        for c in 0..resolution - 1 {
            let corners = [(r, c), (r, c + 1), (r + 1, c + 1), (r + 1, c)];
            let valid: Vec<usize> = corners
                .iter()
                .filter_map(|&(i, j)| index[i * resolution + j])
                .collect();
            match *valid.as_slice() {
                [v0, v1, v2, v3] => {
                    mesh.faces.push([v0, v1, v2]);
                    mesh.faces.push([v0, v2, v3]);
                }
                [v0, v1, v2] => mesh.faces.push([v0, v1, v2]),
                _ => {}
            }
        }
    }
    Ok(mesh)
}

impl Mesh {
    pub fn write_obj(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(
            w,
            "# sepcurv mesh: {} vertices, {} faces",
            self.vertices.len(),
            self.faces.len()
        )?;
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }

    /// `vertex,k_special,k_oracle` keyed by 1-based OBJ vertex index.
    pub fn write_sidecar(&self, w: &mut dyn Write) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["vertex", "k_special", "k_oracle"])?;
        for (k, (ks, ko)) in self.k_special.iter().zip(&self.k_oracle).enumerate() {
            out.write_record([(k + 1).to_string(), ks.to_string(), ko.to_string()])?;
        }
        out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sepcurv::families::FamilySpec;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn unit_sphere_cap_has_unit_curvature() {
        let fam = FamilySpec::Hypersphere {
            n: 3,
            radius: 1.0,
            center: None,
        }
        .build()
        .unwrap();
        let m = build_mesh(
            &fam.surface,
            [(-1.0, 1.0), (-1.0, 1.0)],
            32,
            (0.0, 1.01),
            &tol(),
        )
        .unwrap();
        assert!(m.vertices.len() > 500 && m.vertices.len() < 32 * 32);
        assert!(m
            .k_special
            .iter()
            .chain(&m.k_oracle)
            .all(|k| (k - 1.0).abs() <= 1e-6));
        for v in &m.vertices {
            assert!((v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - 1.0).abs() <= 4e-12);
        }
        assert!(m.faces.iter().flatten().all(|&i| i < m.vertices.len()));
    }

    #[test]
    fn full_grid_triangulates_every_cell() {
        let fam = FamilySpec::CobbDouglasSqrt {
            n: 3,
            a: 1.0,
            shifts: None,
        }
        .build()
        .unwrap();
        let m = build_mesh(
            &fam.surface,
            [(0.5, 2.0), (0.5, 2.0)],
            5,
            fam.sampling.bracket,
            &tol(),
        )
        .unwrap();
        assert_eq!(m.vertices.len(), 25);
        assert_eq!(m.faces.len(), 2 * 16);
        assert!(m.k_special.iter().all(|k| k.abs() <= 1e-12));
    }

    #[test]
    fn single_missing_corner_leaves_one_triangle() {
        // the corner at (1, 1) lies outside the unit disk and is dropped
        let fam = FamilySpec::Hypersphere {
            n: 3,
            radius: 1.0,
            center: None,
        }
        .build()
        .unwrap();
        let m = build_mesh(
            &fam.surface,
            [(0.0, 0.8), (0.0, 0.8)],
            2,
            (0.0, 1.01),
            &tol(),
        )
        .unwrap();
        assert_eq!(m.vertices.len(), 3);
        assert_eq!(m.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn empty_grid() {
        let fam = FamilySpec::Hypersphere {
            n: 3,
            radius: 1.0,
            center: None,
        }
        .build()
        .unwrap();
        let m = build_mesh(
            &fam.surface,
            [(-1.0, 1.0), (-1.0, 1.0)],
            0,
            (0.0, 1.01),
            &tol(),
        )
        .unwrap();
        assert!(m.vertices.is_empty() && m.faces.is_empty());
        let four = FamilySpec::Hypersphere {
            n: 4,
            radius: 1.0,
            center: None,
        }
        .build()
        .unwrap();
        assert!(build_mesh(
            &four.surface,
            [(-1.0, 1.0), (-1.0, 1.0)],
            4,
            (0.0, 1.01),
            &tol()
        )
        .is_err());
    }

    #[test]
    fn obj_and_sidecar_text() {
        let m = Mesh {
            vertices: vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.5], [0.0, 1.0, 0.25]],
            k_special: vec![1.0, 1.0, 0.5],
            k_oracle: vec![1.0, 1.0, 0.5],
            faces: vec![[0, 1, 2]],
        };
        let mut obj = Vec::new();
        m.write_obj(&mut obj).unwrap();
        let obj = String::from_utf8(obj).unwrap();
        assert!(obj.contains("\nv 1 0 0.5\n"));
        assert!(obj.ends_with("f 1 2 3\n"));
        let mut csv = Vec::new();
        m.write_sidecar(&mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "vertex,k_special,k_oracle\n1,1,1\n2,1,1\n3,0.5,0.5\n"
        );
    }
}
