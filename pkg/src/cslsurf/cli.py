"""Command-line front end.

Subcommands: ``tensors``, ``rates``, ``validate``, ``sweep``,
``dephasing``.  Configuration comes from a JSON document (--config),
inline shape JSON (--shape) or a mesh file (--mesh); flags override the
config.  Quantities accept unit suffixes ("1e-5 cm", "2 g/cm^3",
"60 deg") and are normalized to SI in the emitted report, which embeds
the fully resolved configuration for reproducibility.

Exit codes: 0 success, 1 usage or configuration error, 2 validation
tolerance failure, 3 resource cap exceeded.
"""

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .csl import (
    CslParams,
    com_heating_rate,
    dephasing_matrix,
    dephasing_prefactor,
    rate_report,
    superposition_dephasing_rate,
    total_heating_rate,
)
from .errors import (
    ConfigError,
    CslsurfError,
    GridTooLarge,
    QuadratureNotConverged,
    ResolutionOverflow,
    SpacingTooCoarse,
)
from .geometry import (
    DEFAULT_RESOLUTION,
    Box,
    ConeCappedCylinder,
    Cylinder,
    EllipticCylinder,
    GappedCylinder,
    Mesh,
    Sphere,
    load_mesh,
    mass_properties,
    quadrature,
)
from .oracle import (
    decoherence_function,
    gradient_outer_integral,
    kspace_outer_integral,
    rasterize_smoothed_density,
    surface_formula_outer_integral,
)
from .tensors import (
    axial_rotational_strength,
    principal_axes,
    rotational_surface_tensor,
    surface_tensor,
)
from .units import parse_quantity, parse_vector

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_RESOURCE = 3

_SHAPE_FIELDS = {
    "sphere": (Sphere, {"radius": "length"}),
    "cylinder": (Cylinder, {"radius": "length", "length": "length"}),
    "box": (Box, {}),
    "cone_capped_cylinder": (
        ConeCappedCylinder,
        {"radius": "length", "length": "length", "apex_angle": "angle"},
    ),
    "elliptic_cylinder": (
        EllipticCylinder,
        {"semi_axis_a": "length", "semi_axis_b": "length", "length": "length"},
    ),
    "gapped_cylinder": (
        GappedCylinder,
        {"radius": "length", "length": "length", "gap_width": "length"},
    ),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _shape_from_json(doc):
    if not isinstance(doc, dict) or "type" not in doc:
        raise ConfigError(f"shape spec must be an object with a 'type': {doc!r}")
    kind = doc["type"].lower()
    if kind == "mesh":
        if "path" not in doc:
            raise ConfigError("mesh shape needs a 'path'")
        return Mesh(mesh=load_mesh(doc["path"]))
    if kind not in _SHAPE_FIELDS:
        raise ConfigError(f"unknown shape type {doc['type']!r}")
    cls, dims = _SHAPE_FIELDS[kind]
    kwargs = {}
    for key, value in doc.items():
        if key == "type":
            continue
        if key == "cavities":
            kwargs["cavities"] = tuple(_shape_from_json(c) for c in value)
        elif key == "center":
            kwargs["center"] = tuple(parse_vector(value, "length"))
        elif key == "axis":
            kwargs["axis"] = value if isinstance(value, str) else tuple(float(x) for x in value)
        elif key == "size":
            kwargs["size"] = tuple(parse_quantity(v, "length") for v in value)
        elif key == "gap_count":
            kwargs["gap_count"] = int(value)
        elif key in dims:
            kwargs[key] = parse_quantity(value, dims[key])
        else:
            raise ConfigError(f"unknown field {key!r} for shape {kind!r}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad shape spec: {exc}") from None


def _shape_to_json(spec):
    if isinstance(spec, Mesh):
        doc = {"type": "mesh", "vertices": len(spec.mesh.vertices),
               "faces": len(spec.mesh.faces)}
    else:
        names = {Sphere: "sphere", Cylinder: "cylinder", Box: "box",
                 ConeCappedCylinder: "cone_capped_cylinder",
                 EllipticCylinder: "elliptic_cylinder",
                 GappedCylinder: "gapped_cylinder"}
        doc = {"type": names[type(spec)]}
        for fld in spec.__dataclass_fields__:
            if fld in ("center", "cavities"):
                continue
            val = getattr(spec, fld)
            doc[fld] = list(val) if isinstance(val, tuple) else val
    doc["center"] = list(spec.center)
    if spec.cavities:
        doc["cavities"] = [_shape_to_json(c) for c in spec.cavities]
    return doc


def _resolve(args):
    """Merge config file and flags into (shape, density, params, options)."""
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    if getattr(args, "shape", None):
        cfg["shape"] = json.loads(args.shape)
    if getattr(args, "mesh", None):
        cfg["mesh"] = args.mesh
    if "shape" in cfg and "mesh" in cfg:
        raise ConfigError("give exactly one shape source (shape or mesh), not both")
    if "shape" in cfg:
        shape = _shape_from_json(cfg["shape"])
    elif "mesh" in cfg:
        shape = Mesh(mesh=load_mesh(cfg["mesh"]))
    else:
        raise ConfigError("no shape given (use --shape, --mesh, or a config file)")

    density = None
    if getattr(args, "density", None) is not None:
        density = parse_quantity(args.density, "density")
    elif cfg.get("density") is not None:
        density = parse_quantity(cfg["density"], "density")

    pdoc = dict(cfg.get("params", {}))
    if getattr(args, "collapse_rate", None) is not None:
        pdoc["collapse_rate"] = args.collapse_rate
    if getattr(args, "sigma", None) is not None:
        pdoc["localization_length"] = args.sigma
    pkw = {}
    for key, dim in (("collapse_rate", "rate"), ("localization_length", "length"),
                     ("nucleon_mass", "mass"), ("hbar", "dimensionless")):
        if key in pdoc:
            pkw[key] = parse_quantity(pdoc[key], dim)
    params = CslParams(**pkw)

    resolution = getattr(args, "resolution", None) or cfg.get("resolution") or DEFAULT_RESOLUTION
    options = {
        "resolution": int(resolution),
        "format": getattr(args, "format", None) or cfg.get("format", "json"),
        "tolerance": float(getattr(args, "tolerance", None) or cfg.get("tolerance", 0.01)),
        "config": cfg,
    }
    return shape, density, params, options


def _resolved_config(shape, density, params, options, extra=None):
    doc = {
        "shape": _shape_to_json(shape),
        "density": density,
        "params": {
            "collapse_rate": params.collapse_rate,
            "localization_length": params.localization_length,
            "nucleon_mass": params.nucleon_mass,
            "hbar": params.hbar,
        },
        "resolution": options["resolution"],
    }
    if extra:
        doc.update(extra)
    return doc


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (list, int, float)):
        rows.append((prefix, json.dumps(obj)))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, obj))


def _emit(report, options, out_path, table=None):
    """Write the report as JSON, or as CSV when requested."""
    if options["format"] == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        if table is not None:
            writer.writerow(table["columns"])
            for row in table["rows"]:
                writer.writerow(row)
        else:
            rows = []
            _flatten("", _jsonify(report), rows)
            writer.writerow(["key", "value"])
            writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(_jsonify(report), indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _body_tensors(shape, resolution, origin=None):
    patches = quadrature(shape, resolution=resolution)
    props = mass_properties(shape, 1.0)  # geometric part only
    origin = props.centroid if origin is None else np.asarray(origin, dtype=float)
    s = surface_tensor(patches)
    s_rot = rotational_surface_tensor(patches, origin)
    return patches, props, s, s_rot, origin


# ---------------------------------------------------------------------------
# subcommands


def _cmd_tensors(args):
    shape, density, params, options = _resolve(args)
    origin = parse_vector(args.origin, "length") if args.origin else None
    patches, geo, s, s_rot, origin = _body_tensors(shape, options["resolution"], origin)
    vals, vecs = principal_axes(geo.inertia)
    results = {
        "area": patches.total_area,
        "volume": geo.volume,
        "centroid": geo.centroid,
        "surface_tensor": s,
        "rotational_surface_tensor": s_rot,
        "rotational_origin": origin,
        "inertia_per_density": geo.inertia,
        "inertia_principal_moments_per_density": vals,
        "inertia_principal_axes": vecs.T,
        "patch_count": len(patches),
    }
    if density is not None:
        mp = mass_properties(shape, density)
        results["mass"] = mp.mass
        results["inertia"] = mp.inertia
    report = {
        "version": __version__,
        "command": "tensors",
        "config": _resolved_config(shape, density, params, options),
        "results": results,
    }
    _emit(report, options, args.out)
    return EXIT_OK


def _cmd_rates(args):
    shape, density, params, options = _resolve(args)
    if density is None:
        raise ConfigError("rates require --density")
    patches, _, s, s_rot, origin = _body_tensors(shape, options["resolution"])
    props = mass_properties(shape, density)
    rep = rate_report(s, s_rot, props, density, params,
                      inertia_convention=args.inertia_convention)
    results = {
        "dephasing_matrix": rep.dephasing.matrix,
        "angular_dephasing_coefficients": rep.angular_coefficients,
        "angular_dephasing_axes": rep.angular_axes.T,
        "com_heating_watts": rep.com_heating,
        "total_heating_watts": rep.total_heating,
        "rotational_heating_watts": rep.rotational_heating,
        "com_heating_fraction": rep.com_fraction,
        "mass": props.mass,
        "area": props.area,
        "volume": props.volume,
    }
    report = {
        "version": __version__,
        "command": "rates",
        "config": _resolved_config(shape, density, params, options,
                                   {"inertia_convention": args.inertia_convention}),
        "results": results,
    }
    _emit(report, options, args.out)
    return EXIT_OK


def _cmd_validate(args):
    shape, density, params, options = _resolve(args)
    if density is None:
        density = 1000.0  # cancels in every relative comparison
    sigma = params.localization_length
    spacing = parse_quantity(args.spacing, "length") if args.spacing else None
    padding = parse_quantity(args.padding, "length") if args.padding else None
    patches = quadrature(shape, resolution=options["resolution"])
    s = surface_tensor(patches)
    surf = surface_formula_outer_integral(s, density, sigma)
    grid = rasterize_smoothed_density(
        shape, density, sigma, spacing=spacing, padding=padding,
        max_voxels=args.max_voxels,
    )
    grad = gradient_outer_integral(grid)
    kint = kspace_outer_integral(shape, density, sigma, max_voxels=args.max_voxels)

    def rel(a, b):
        return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b)))

    pairs = {
        "gradient_vs_kspace": rel(grad, kint),
        "surface_vs_gradient": rel(surf, grad),
        "surface_vs_kspace": rel(surf, kint),
    }
    tol = options["tolerance"]
    passed = all(v <= tol for v in pairs.values())
    results = {
        "surface_formula": surf,
        "gradient_integral": grad,
        "kspace_integral": kint,
        "pairwise_relative_errors": pairs,
        "tolerance": tol,
        "grid_dims": list(grid.dims),
        "grid_spacing": grid.spacing,
        "passed": passed,
    }
    report = {
        "version": __version__,
        "command": "validate",
        "config": _resolved_config(shape, density, params, options,
                                   {"spacing": grid.spacing, "padding": grid.margin}),
        "results": results,
    }
    table = {
        "columns": ["pair", "relative_error", "tolerance", "passed"],
        "rows": [[k, v, tol, v <= tol] for k, v in pairs.items()],
    }
    _emit(report, options, args.out, table=table)
    return EXIT_OK if passed else EXIT_TOLERANCE


_SWEEP_VARIABLES = ("L", "theta", "N", "e", "R")


def _sweep_shape(base, variable, value):
    kw = {f: getattr(base, f) for f in base.__dataclass_fields__}
    if variable == "L":
        if "length" not in kw:
            raise ConfigError(f"cannot sweep L on {type(base).__name__}")
        kw["length"] = value
    elif variable == "R":
        if "radius" not in kw:
            raise ConfigError(f"cannot sweep R on {type(base).__name__}")
        kw["radius"] = value
    elif variable == "theta":
        if not isinstance(base, ConeCappedCylinder):
            raise ConfigError("theta sweeps need a cone_capped_cylinder")
        kw["apex_angle"] = value
    elif variable == "N":
        if not isinstance(base, GappedCylinder):
            raise ConfigError("N sweeps need a gapped_cylinder")
        kw["gap_count"] = int(value)
    elif variable == "e":
        if not isinstance(base, EllipticCylinder):
            raise ConfigError("e sweeps need an elliptic_cylinder")
        a = kw["semi_axis_a"]
        kw["semi_axis_b"] = a * math.sqrt(max(1.0 - value**2, 0.0))
    else:
        raise ConfigError(f"unknown sweep variable {variable!r} (use {_SWEEP_VARIABLES})")
    return type(base)(**kw)


def _cmd_sweep(args):
    shape, density, params, options = _resolve(args)
    sweep_cfg = options["config"].get("sweep", {})
    variable = args.variable or sweep_cfg.get("variable")
    values = args.values or sweep_cfg.get("values")
    if not variable or not values:
        raise ConfigError("sweep needs a variable and values")
    if isinstance(values, str):
        values = values.split(",")
    dim = {"L": "length", "R": "length", "theta": "angle", "N": "dimensionless",
           "e": "dimensionless"}.get(variable)
    if dim is None:
        raise ConfigError(f"unknown sweep variable {variable!r} (use {_SWEEP_VARIABLES})")
    values = [parse_quantity(v, dim) for v in values]

    axis = np.asarray(getattr(shape, "axis", (1.0, 0.0, 0.0)), dtype=float)
    columns = ["value", "area", "volume", "s_axis", "s_xx", "s_yy", "s_zz", "srot_axis"]
    if density is not None:
        columns += ["lambda_axis", "com_heating_watts", "total_heating_watts"]
    rows = []
    for value in values:
        spec = _sweep_shape(shape, variable, value)
        patches, geo, s, s_rot, origin = _body_tensors(spec, options["resolution"])
        row = [
            value,
            patches.total_area,
            geo.volume,
            float(axis @ s @ axis),
            s[0, 0], s[1, 1], s[2, 2],
            axial_rotational_strength(patches, origin, axis),
        ]
        if density is not None:
            mass = geo.volume * density
            row += [
                dephasing_prefactor(density, params) * row[3],
                com_heating_rate(patches.total_area, mass, density, params),
                total_heating_rate(mass, params),
            ]
        rows.append(row)
    report = {
        "version": __version__,
        "command": "sweep",
        "config": _resolved_config(shape, density, params, options,
                                   {"sweep": {"variable": variable, "values": values}}),
        "results": {"columns": columns, "rows": rows},
    }
    _emit(report, options, args.out, table={"columns": columns, "rows": rows})
    return EXIT_OK


def _cmd_dephasing(args):
    shape, density, params, options = _resolve(args)
    if density is None:
        raise ConfigError("dephasing requires --density")
    delta_doc = args.delta or options["config"].get("delta")
    if delta_doc is None:
        raise ConfigError("dephasing requires --delta")
    delta = np.asarray(parse_vector(delta_doc, "length"), dtype=float)
    patches, _, s, s_rot, origin = _body_tensors(shape, options["resolution"])
    dm = dephasing_matrix(s, density, params)
    sep = float(np.linalg.norm(delta))
    sigma = params.localization_length
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rate = superposition_dephasing_rate(dm, delta)
    warned = any(issubclass(w.category, UserWarning) for w in caught)
    results = {
        "delta": delta,
        "delta_over_sigma": sep / sigma,
        "dephasing_matrix": dm.matrix,
        "rate_per_second": rate,
        "quadratic_regime_warning": warned,
    }
    if args.exact:
        grid = rasterize_smoothed_density(shape, density, sigma,
                                          max_voxels=args.max_voxels)
        exact = decoherence_function(grid, delta, params)
        results["exact_rate_per_second"] = exact
        results["quadratic_vs_exact_relative"] = (
            abs(rate - exact) / exact if exact else 0.0
        )
    report = {
        "version": __version__,
        "command": "dephasing",
        "config": _resolved_config(shape, density, params, options,
                                   {"delta": list(delta)}),
        "results": results,
    }
    _emit(report, options, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--shape", help="inline shape JSON")
    sub.add_argument("--mesh", help="STL or OBJ file")
    sub.add_argument("--density", help="material density (e.g. '2 g/cm^3')")
    sub.add_argument("--lambda", dest="collapse_rate", help="collapse rate (1/s)")
    sub.add_argument("--sigma", help="localization length (e.g. '1e-5 cm')")
    sub.add_argument("--resolution", type=int, help="patches per characteristic length")
    sub.add_argument("--format", choices=("json", "csv"))
    sub.add_argument("--out", help="write the report here instead of stdout")
    sub.add_argument("--tolerance", type=float, help="validation tolerance")


def build_parser():
    parser = _Parser(prog="cslsurf", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"cslsurf {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("tensors", help="surface tensors and mass properties")
    _add_common(p)
    p.add_argument("--origin", help="override origin for the rotational tensor")
    p.set_defaults(func=_cmd_tensors)

    p = subs.add_parser("rates", help="dephasing matrix and heating rates")
    _add_common(p)
    p.add_argument("--inertia-convention", choices=("standard", "second_moment"),
                   default="standard")
    p.set_defaults(func=_cmd_rates)

    p = subs.add_parser("validate", help="cross-check surface formula against oracles")
    _add_common(p)
    p.add_argument("--spacing", help="voxel spacing (default sigma/2)")
    p.add_argument("--padding", help="grid padding (default 6 sigma)")
    p.add_argument("--max-voxels", type=int, default=512**3)
    p.set_defaults(func=_cmd_validate)

    p = subs.add_parser("sweep", help="parameter sweeps of the tensor outputs")
    _add_common(p)
    p.add_argument("--variable", choices=_SWEEP_VARIABLES)
    p.add_argument("--values", help="comma-separated parameter values")
    p.set_defaults(func=_cmd_sweep)

    p = subs.add_parser("dephasing", help="superposition dephasing rate")
    _add_common(p)
    p.add_argument("--delta", help="separation vector, e.g. '1e-9 m,0,0'")
    p.add_argument("--exact", action="store_true",
                   help="also evaluate the full decoherence function on a grid")
    p.add_argument("--max-voxels", type=int, default=512**3)
    p.set_defaults(func=_cmd_dephasing)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (GridTooLarge, ResolutionOverflow, SpacingTooCoarse) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except QuadratureNotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (CslsurfError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
