use std::f64::consts::PI;

use crate::brdf::SurfaceMaterial;
use crate::error::{Error, Result};
use crate::grid::Footprint;
use crate::math::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Unit sphere at the origin with spherical uv.
    Sphere,
    /// The plane `y = 0` with planar uv tiling.
    Plane,
}

impl std::str::FromStr for Geometry {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(Self::Sphere),
            "plane" | "ground" => Ok(Self::Plane),
            _ => Err(format!("expected `sphere` or `plane`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub position: Vec3,
    pub look_at: Vec3,
    pub vfov_deg: f64,
    pub width: usize,
    pub height: usize,
}

impl Camera {
    pub fn looking_at_sphere(resolution: usize) -> Self {
        Self {
            position: Vec3::new(0.0, 0.0, 3.2),
            look_at: Vec3::new(0.0, 0.0, 0.0),
            vfov_deg: 45.0,
            width: resolution,
            height: resolution,
        }
    }

    /// World-space direction through image position `(px, py)` in pixels.
    pub fn ray_direction(&self, px: f64, py: f64) -> Vec3 {
        let forward = (self.look_at - self.position).normalized();
        let up_hint = if forward.y.abs() > 0.999 { Vec3::new(0.0, 0.0, -1.0) } else { Vec3::new(0.0, 1.0, 0.0) };
        let right = forward.cross(up_hint).normalized();
        let up = right.cross(forward);
        let half = (self.vfov_deg.to_radians() * 0.5).tan();
        let aspect = self.width as f64 / self.height as f64;
        let sx = (2.0 * px / self.width as f64 - 1.0) * half * aspect;
        let sy = (1.0 - 2.0 * py / self.height as f64) * half;
        (forward + right * sx + up * sy).normalized()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scene {
    pub geometry: Geometry,
    pub camera: Camera,
    /// Azimuthal rotation of the environment about +y, degrees.
    pub env_rotation_deg: f64,
    pub material: SurfaceMaterial,
    /// uv units per sphere parameter range (or per world unit on the plane).
    pub uv_scale: f64,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        if self.camera.width < 16 || self.camera.height < 16 {
            return Err(Error::config("scene.resolution", "must be at least 16x16"));
        }
        if !(self.camera.vfov_deg > 1.0 && self.camera.vfov_deg < 179.0) {
            return Err(Error::config("scene.fov", "must lie in (1, 179) degrees"));
        }
        if !(self.uv_scale > 0.0 && self.uv_scale.is_finite()) {
            return Err(Error::config("scene.uv_scale", "must be positive"));
        }
        self.material.validate()
    }

    /// Rotate a world direction into the environment's frame.
    pub fn env_direction(&self, d: Vec3) -> Vec3 {
        d.rotate_y(-self.env_rotation_deg.to_radians())
    }

    /// Primary-ray intersection for pixel `(x, y)`.
    pub fn trace(&self, x: usize, y: usize) -> Option<SurfaceHit> {
        let cam = &self.camera;
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let origin = cam.position;
        let dir = cam.ray_direction(px, py);
        let t = self.intersect(origin, dir)?;
        let p = origin + dir * t;
        let (normal, uv, dpdu, dpdv) = self.surface(p);
        let wo = -dir;
        if normal.dot(wo) <= 0.0 {
            return None;
        }
        // Ray differentials intersected with the tangent plane.
        let offset = |d: Vec3| {
            let denom = normal.dot(d);
            if denom.abs() < 1e-12 {
                return None;
            }
            Some(origin + d * (normal.dot(p - origin) / denom) - p)
        };
        let solve = |dp: Option<Vec3>| -> [f64; 2] {
            let Some(dp) = dp else { return [f64::INFINITY; 2] };
            let (a, b, c) = (dpdu.dot(dpdu), dpdu.dot(dpdv), dpdv.dot(dpdv));
            let det = a * c - b * b;
            if det.abs() < 1e-300 {
                return [f64::INFINITY; 2];
            }
            let (ru, rv) = (dpdu.dot(dp), dpdv.dot(dp));
            [(c * ru - b * rv) / det, (a * rv - b * ru) / det]
        };
        let duv_dx = solve(offset(cam.ray_direction(px + 1.0, py)));
        let duv_dy = solve(offset(cam.ray_direction(px, py + 1.0)));
        Some(SurfaceHit {
            position: p,
            normal,
            wo,
            uv,
            footprint: Footprint::from_derivatives(uv, duv_dx, duv_dy),
        })
    }

    fn intersect(&self, o: Vec3, d: Vec3) -> Option<f64> {
        match self.geometry {
            Geometry::Sphere => {
                let b = o.dot(d);
                let c = o.dot(o) - 1.0;
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                [-b - s, -b + s].into_iter().find(|t| *t > 1e-9)
            }
            Geometry::Plane => {
                if d.y.abs() < 1e-12 {
                    return None;
                }
                let t = -o.y / d.y;
                (t > 1e-9).then_some(t)
            }
        }
    }

    /// Normal, scaled uv and the uv tangents `∂p/∂u`, `∂p/∂v` at `p`.
    fn surface(&self, p: Vec3) -> (Vec3, [f64; 2], Vec3, Vec3) {
        let s = self.uv_scale;
        match self.geometry {
            Geometry::Sphere => {
                let n = p.normalized();
                let theta = n.y.clamp(-1.0, 1.0).acos();
                let phi = n.z.atan2(n.x);
                let uv = [(phi / (2.0 * PI) + 0.5) * s, theta / PI * s];
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                let dpdu = Vec3::new(-st * sp, 0.0, st * cp) * (2.0 * PI / s);
                let dpdv = Vec3::new(ct * cp, -st, ct * sp) * (PI / s);
                (n, uv, dpdu, dpdv)
            }
            Geometry::Plane => (
                Vec3::new(0.0, 1.0, 0.0),
                [p.x * s, p.z * s],
                Vec3::new(1.0 / s, 0.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0 / s),
            ),
        }
    }
}

/// Shading inputs of one visible surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceHit {
    pub position: Vec3,
    pub normal: Vec3,
    pub wo: Vec3,
    pub uv: [f64; 2],
    pub footprint: Footprint,
}

impl SurfaceHit {
    pub fn cos_o(&self) -> f64 {
        self.normal.dot(self.wo).clamp(0.0, 1.0)
    }

    pub fn reflected(&self) -> Vec3 {
        self.wo.reflect(self.normal)
    }
}
