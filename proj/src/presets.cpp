#include "vmoidx/presets.hpp"

#include "vmoidx/error.hpp"

namespace vmoidx {
namespace {

// e_theta and e_phi of the angles chart of the (2, 1) torus, u = theta, v = phi.
std::string torus_director(const std::string& k) {
  const std::string c = "cos(" + k + "*v)", s = "sin(" + k + "*v)";
  return c + "*(-sin(u)*cos(v)) - " + s + "*sin(v), " + c + "*(-sin(u)*sin(v)) + " + s + "*cos(v), " + c +
         "*cos(u)";
}

}  // namespace

const std::vector<Preset>& preset_catalog() {
  static const std::vector<Preset> presets = {
      {"disk-constant", "index", "disk", "0, 1, 0", "",
       "constant field on the unit disk: ind 0, inward index 1"},
      {"disk-rotation", "index", "disk", "-y, x, 0", "",
       "rotation on the unit disk: ind 1, inward index 0"},
      {"disk-saddle", "index", "disk", "y, x, 0", "",
       "saddle on the unit disk: ind -1, inward index 2"},
      {"sphere-rotation", "index", "sphere", "-y, x, 0", "",
       "rotation about the z axis on the unit sphere: ind 2"},
      {"torus-longitude", "index", "torus", "-y, x, 0", "",
       "coordinate field d/dphi on the (2, 1) torus: ind 0"},
      {"vmo-saddle", "vmo-index", "disk", "y, x, 0", "",
       "mollified saddle on the disk: ind -1, inward index 2"},
      {"vmo-torus", "vmo-index", "torus", "-y, x, 0", "",
       "mollified longitude field on the torus: ind 0"},
      {"vmo-vortex", "vmo-index", "disk",
       "-y / (sqrt(x^2 + y^2) + 1e-300), x / (sqrt(x^2 + y^2) + 1e-300), 0", "",
       "bounded vortex with a point singularity at the origin: ind 1"},
      {"extend-constant", "extend", "disk", "", "0, 1, 0",
       "constant datum on the unit circle: extends without zeros"},
      {"extend-tangent", "extend", "disk", "", "-sin(theta), cos(theta), 0",
       "unit tangent datum on the unit circle: obstructed"},
      {"extend-annulus", "extend", "annulus", "", "-sin(theta), cos(theta), 0",
       "unit angular datum on both annulus circles: extends without zeros"},
      {"torus-half-turn", "linefield", "torus", torus_director("0.5"), "",
       "director turning by pi along the phi-loop: not orientable"},
      {"torus-three-half-turns", "linefield", "torus", torus_director("1.5"), "",
       "director turning by 3 pi along the phi-loop: not orientable"},
      {"linefield-frame", "linefield", "torus", torus_director("0"), "",
       "director e_theta: orientable"},
      {"linefield-sphere", "linefield", "sphere", "-x*z, -y*z, 1 - z^2", "",
       "meridian directions on the sphere: no continuous line field"},
  };
  return presets;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : preset_catalog()) {
    if (p.name == name) return p;
  }
  fail(ErrorCode::ConfigError, "unknown preset '" + name + "'");
}

RunConfig apply_preset(RunConfig c) {
  if (!c.preset.empty()) {
    const Preset& p = find_preset(c.preset);
    if (c.surface.empty()) c.surface = p.surface;
    if (c.field.empty()) c.field = p.field;
    if (c.datum.empty()) c.datum = p.datum;
  }
  if (c.surface.empty()) c.surface = "disk";
  return c;
}

}  // namespace vmoidx
