"""Triangle meshes: STL/OBJ ingestion, validation, and integral properties.

Meshes must be watertight (every undirected edge shared by exactly two
triangles) and consistently wound.  A consistently inward-wound mesh is
repaired by flipping every face; mixed winding is rejected.
"""

import io
import struct
from pathlib import Path

import numpy as np

from ..errors import InvertedOrientation, NonWatertightMesh, ParseError
from .patches import SurfacePatches

# vertex dedup tolerance, relative to the bounding-box diagonal
DEDUP_RELATIVE_TOL = 1e-9


class TriangleMesh:
    """Indexed triangle mesh with outward orientation.

    Parameters
    ----------
    vertices : (n, 3) float array
    faces : (m, 3) int array, indices into vertices
    validate : bool
        When true (default), check watertightness and winding
        consistency, and flip a consistently inward mesh.
    """

    def __init__(self, vertices, faces, validate=True):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise ParseError("vertices must be (n, 3)")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise ParseError("faces must be (m, 3)")
        if len(self.faces) and self.faces.max() >= len(self.vertices):
            raise ParseError("face index exceeds vertex count")
        if validate:
            self._check_topology()
            if self.volume() < 0:
                self.faces = self.faces[:, ::-1]

    # -- topology ------------------------------------------------------

    def _directed_edges(self):
        f = self.faces
        return np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])

    def _check_topology(self):
        de = self._directed_edges()
        undirected = np.sort(de, axis=1)
        _, counts = np.unique(undirected, axis=0, return_counts=True)
        if np.any(counts != 2):
            n_bad = int(np.sum(counts != 2))
            raise NonWatertightMesh(
                f"{n_bad} edges are not shared by exactly two triangles"
            )
        # watertight and manifold: consistent winding means every directed
        # edge appears exactly once
        _, dcounts = np.unique(de, axis=0, return_counts=True)
        if np.any(dcounts != 1):
            raise InvertedOrientation(
                "triangle winding is inconsistent between neighbors"
            )

    def is_watertight(self):
        try:
            self._check_topology()
        except (NonWatertightMesh, InvertedOrientation):
            return False
        return True

    # -- per-face quantities -------------------------------------------

    def corners(self):
        v, f = self.vertices, self.faces
        return v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]

    def face_cross(self):
        p0, p1, p2 = self.corners()
        return np.cross(p1 - p0, p2 - p0)

    def face_areas(self):
        return 0.5 * np.linalg.norm(self.face_cross(), axis=1)

    def face_normals(self):
        cr = self.face_cross()
        nrm = np.linalg.norm(cr, axis=1)
        nrm[nrm == 0] = 1.0
        return cr / nrm[:, None]

    # -- integral properties -------------------------------------------

    def area(self):
        return float(np.sum(self.face_areas()))

    def volume(self):
        """Signed volume from the signed tetrahedron sum."""
        p0, p1, p2 = self.corners()
        return float(np.einsum("ij,ij->", p0, np.cross(p1, p2)) / 6.0)

    def volume_divergence(self):
        """Signed volume via the divergence theorem, V = (1/3) sum c.n dS.

        Algebraically equal to :meth:`volume`; kept as an independent
        accumulation for cross-checking.
        """
        cr = self.face_cross()  # n * 2A
        centroids = (self.vertices[self.faces[:, 0]]
                     + self.vertices[self.faces[:, 1]]
                     + self.vertices[self.faces[:, 2]]) / 3.0
        return float(np.einsum("ij,ij->", centroids, cr) / 6.0)

    def integral_moments(self):
        """Return (volume, first moment, second moment) about the origin.

        Exact polynomial integrals over the enclosed solid, accumulated
        from signed origin tetrahedra:  int x_i x_j dV over a tetrahedron
        with vertices {0, a, b, c} equals (V/20)(s o s + a o a + b o b +
        c o c) with s = a + b + c.
        """
        a, b, c = self.corners()
        vt = np.einsum("ij,ij->i", a, np.cross(b, c)) / 6.0
        s = a + b + c
        first = np.einsum("i,ij->j", vt, s) / 4.0
        second = (
            np.einsum("t,ti,tj->ij", vt, s, s)
            + np.einsum("t,ti,tj->ij", vt, a, a)
            + np.einsum("t,ti,tj->ij", vt, b, b)
            + np.einsum("t,ti,tj->ij", vt, c, c)
        ) / 20.0
        return float(np.sum(vt)), first, second

    # -- geometry queries ----------------------------------------------

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def translated(self, offset):
        return TriangleMesh(self.vertices + np.asarray(offset, float), self.faces, validate=False)

    def contains(self, points, chunk=4096):
        """Even-odd ray-parity test.

        The ray direction is a fixed incommensurate unit vector so that
        rays from symmetric queries do not thread mesh vertices or edges
        (an axis-aligned ray through an icosphere center would).
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        p0, p1, p2 = self.corners()
        e1 = p1 - p0
        e2 = p2 - p0
        d = np.array([0.852394209871, 0.413728902345, 0.319847102937])
        d /= np.linalg.norm(d)
        pvec = np.cross(d, e2)                       # (m, 3)
        det = np.einsum("ij,ij->i", e1, pvec)        # (m,)
        ok = np.abs(det) > 1e-300
        inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
        out = np.zeros(len(points), dtype=bool)
        for lo in range(0, len(points), chunk):
            pts = points[lo:lo + chunk]
            tvec = pts[:, None, :] - p0[None, :, :]          # (p, m, 3)
            u = np.einsum("pmj,mj->pm", tvec, pvec) * inv_det
            qvec = np.cross(tvec, e1[None, :, :])
            v = np.einsum("pmj,j->pm", qvec, d) * inv_det
            t = np.einsum("pmj,mj->pm", qvec, e2) * inv_det
            hit = (ok[None, :] & (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 0))
            out[lo:lo + chunk] = np.sum(hit, axis=1) % 2 == 1
        return out

    def surface_patches(self):
        """Mid-edge three-point rule per facet.

        Exact for integrands quadratic in position over each flat facet,
        which covers both surface tensors.
        """
        p0, p1, p2 = self.corners()
        areas = self.face_areas()
        normals = self.face_normals()
        mids = np.concatenate([(p0 + p1) / 2, (p1 + p2) / 2, (p2 + p0) / 2])
        return SurfacePatches(
            points=mids,
            normals=np.tile(normals, (3, 1)),
            weights=np.tile(areas / 3.0, 3),
        )


# ---------------------------------------------------------------------------
# parsing


def _dedup(vertices, faces):
    vertices = np.asarray(vertices, dtype=float)
    faces = np.asarray(faces, dtype=np.int64)
    if len(vertices) == 0 or len(faces) == 0:
        raise ParseError("mesh has no geometry")
    span = vertices.max(axis=0) - vertices.min(axis=0)
    diag = float(np.linalg.norm(span))
    if diag == 0.0:
        raise ParseError("mesh is degenerate (zero bounding box)")
    tol = DEDUP_RELATIVE_TOL * diag
    keys = np.round(vertices / tol).astype(np.int64)
    uniq, index, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    new_vertices = vertices[index]
    new_faces = inverse[faces]
    # drop faces that collapsed during welding
    good = (
        (new_faces[:, 0] != new_faces[:, 1])
        & (new_faces[:, 1] != new_faces[:, 2])
        & (new_faces[:, 2] != new_faces[:, 0])
    )
    return new_vertices, new_faces[good]


def _parse_stl_binary(data):
    if len(data) < 84:
        raise ParseError("binary STL shorter than its 84-byte header")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) != expected:
        raise ParseError(f"binary STL length {len(data)} != expected {expected}")
    rec = np.frombuffer(data, dtype=np.uint8, count=50 * count, offset=84)
    rec = rec.reshape(count, 50)
    tri = rec[:, 12:48].copy().view("<f4").reshape(count, 3, 3).astype(float)
    vertices = tri.reshape(-1, 3)
    faces = np.arange(3 * count, dtype=np.int64).reshape(count, 3)
    return _dedup(vertices, faces)


def _parse_stl_ascii(text):
    verts = []
    nvert_in_facet = 0
    in_solid = False
    closed = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        tok = line.split()
        key = tok[0].lower()
        if key == "solid":
            in_solid = True
        elif key == "vertex":
            if len(tok) < 4:
                raise ParseError(f"bad vertex line: {line!r}")
            try:
                verts.append([float(tok[1]), float(tok[2]), float(tok[3])])
            except ValueError as exc:
                raise ParseError(f"bad vertex line: {line!r}") from exc
            nvert_in_facet += 1
        elif key == "endfacet":
            if nvert_in_facet != 3:
                raise ParseError("facet without exactly 3 vertices")
            nvert_in_facet = 0
        elif key == "endsolid":
            closed = True
    if not in_solid or not closed:
        raise ParseError("truncated ASCII STL (missing solid/endsolid)")
    if nvert_in_facet:
        raise ParseError("truncated ASCII STL (open facet)")
    if not verts:
        raise ParseError("ASCII STL contains no vertices")
    vertices = np.asarray(verts, dtype=float)
    if len(vertices) % 3:
        raise ParseError("ASCII STL vertex count not a multiple of 3")
    faces = np.arange(len(vertices), dtype=np.int64).reshape(-1, 3)
    return _dedup(vertices, faces)


def _parse_obj(text):
    verts = []
    faces = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if tok[0] == "v":
            if len(tok) < 4:
                raise ParseError(f"bad OBJ vertex: {line!r}")
            try:
                verts.append([float(tok[1]), float(tok[2]), float(tok[3])])
            except ValueError as exc:
                raise ParseError(f"bad OBJ vertex: {line!r}") from exc
        elif tok[0] == "f":
            idx = []
            for part in tok[1:]:
                head = part.split("/")[0]
                try:
                    i = int(head)
                except ValueError as exc:
                    raise ParseError(f"bad OBJ face: {line!r}") from exc
                idx.append(i - 1 if i > 0 else len(verts) + i)
            if len(idx) < 3:
                raise ParseError(f"OBJ face with <3 vertices: {line!r}")
            for k in range(1, len(idx) - 1):  # fan triangulation
                faces.append([idx[0], idx[k], idx[k + 1]])
    if not faces:
        raise ParseError("OBJ contains no faces")
    vertices = np.asarray(verts, dtype=float)
    faces = np.asarray(faces, dtype=np.int64)
    if faces.min() < 0 or faces.max() >= len(vertices):
        raise ParseError("OBJ face index out of range")
    return _dedup(vertices, faces)


def _sniff_format(data):
    if len(data) >= 84:
        (count,) = struct.unpack_from("<I", data, 80)
        if len(data) == 84 + 50 * count:
            return "stl-binary"
    head = data[:512].lstrip()
    if head.startswith(b"solid"):
        return "stl-ascii"
    for line in data.splitlines():
        s = line.strip()
        if s.startswith(b"v ") or s.startswith(b"f "):
            return "obj"
        if s and not s.startswith(b"#"):
            break
    raise ParseError("cannot identify mesh format (expected STL or OBJ)")


def load_mesh(source, fmt=None):
    """Load a triangle mesh from STL (binary or ASCII) or Wavefront OBJ.

    ``source`` may be a path, bytes, or a binary file-like object.
    ``fmt`` is ``"stl"``, ``"obj"`` or ``None`` to auto-detect.  The mesh
    is vertex-welded, checked watertight, and oriented outward.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        data = path.read_bytes()
        if fmt is None:
            ext = path.suffix.lower().lstrip(".")
            fmt = ext if ext in ("stl", "obj") else None
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
        if isinstance(data, str):
            data = data.encode()
    else:
        raise ParseError(f"unsupported mesh source {type(source).__name__}")

    if fmt == "stl":
        kind = _sniff_format(data)
        if kind == "obj":
            raise ParseError("declared stl but content looks like OBJ")
    elif fmt == "obj":
        kind = "obj"
    elif fmt is None:
        kind = _sniff_format(data)
    else:
        raise ParseError(f"unknown mesh format {fmt!r}")

    if kind == "stl-binary":
        vertices, faces = _parse_stl_binary(data)
    elif kind == "stl-ascii":
        vertices, faces = _parse_stl_ascii(data.decode("ascii", errors="replace"))
    else:
        vertices, faces = _parse_obj(data.decode("utf-8", errors="replace"))
    return TriangleMesh(vertices, faces)
