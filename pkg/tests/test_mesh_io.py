"""STL/OBJ parsing, welding, watertightness, and orientation repair."""

import math

import numpy as np
import pytest

from cslsurf.errors import InvertedOrientation, NonWatertightMesh, ParseError
from cslsurf.geometry import (
    TriangleMesh,
    box_mesh,
    icosphere,
    load_mesh,
    mesh_to_obj,
    mesh_to_stl,
)


class TestStl:
    def test_ascii_unit_cube(self, cube_stl_ascii):
        mesh = load_mesh(cube_stl_ascii)
        assert len(mesh.vertices) == 8
        assert len(mesh.faces) == 12
        assert mesh.volume() == pytest.approx(1.0, rel=1e-12)
        assert mesh.area() == pytest.approx(6.0, rel=1e-12)

    def test_binary_unit_cube(self, cube_stl_binary):
        mesh = load_mesh(cube_stl_binary)
        assert len(mesh.vertices) == 8
        assert len(mesh.faces) == 12
        assert mesh.volume() == pytest.approx(1.0, rel=1e-6)

    def test_binary_across_file(self, cube_stl_binary, tmp_path):
        path = tmp_path / "cube.stl"
        path.write_bytes(cube_stl_binary)
        mesh = load_mesh(path)
        assert mesh.volume() == pytest.approx(1.0, rel=1e-6)

    def test_truncated_binary(self, cube_stl_binary):
        with pytest.raises(ParseError):
            load_mesh(cube_stl_binary[:-7])

    def test_truncated_ascii(self, cube_stl_ascii):
        text = cube_stl_ascii.decode()
        cut = text[: text.rindex("endsolid") - 40]
        with pytest.raises(ParseError):
            load_mesh(cut.encode())

    def test_bad_vertex_line(self):
        bad = b"solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0\nendloop\nendfacet\nendsolid x\n"
        with pytest.raises(ParseError):
            load_mesh(bad)

    def test_declared_stl_but_obj(self):
        with pytest.raises(ParseError):
            load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", fmt="stl")


class TestObj:
    def test_icosphere_volume_against_analytic(self):
        # 20 * 4^5 = 20480 facets; analytic ball volume is the oracle
        mesh = icosphere(1.0, 5)
        assert len(mesh.faces) == 20480
        text = mesh_to_obj(mesh)
        loaded = load_mesh(text.encode(), fmt="obj")
        assert len(loaded.faces) == 20480
        exact = 4 * math.pi / 3
        assert abs(loaded.volume() - exact) / exact < 1e-3

    def test_slash_syntax_and_quads(self):
        text = (
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
            "v 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n"
            "f 1/1/1 3/3/3 2/2/2\nf 1 4 3\n"
            "f 5 6 7 8\n"            # quad -> fan
            "f 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n"
        )
        mesh = load_mesh(text.encode())
        assert len(mesh.vertices) == 8
        assert len(mesh.faces) == 12
        assert mesh.volume() == pytest.approx(1.0, rel=1e-12)

    def test_negative_indices(self):
        text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf -4 -3 -2\nf -4 -2 -1\nf -4 -1 -3\nf -3 -1 -2\n"
        mesh = load_mesh(text.encode())
        assert len(mesh.faces) == 4
        assert mesh.volume() == pytest.approx(1.0 / 6.0, rel=1e-12)

    def test_no_faces(self):
        with pytest.raises(ParseError):
            load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\n")

    def test_index_out_of_range(self):
        with pytest.raises(ParseError):
            load_mesh(b"v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n")


class TestTopology:
    def test_open_edge_rejected(self):
        cube = box_mesh(1.0, 1.0, 1.0)
        with pytest.raises(NonWatertightMesh):
            TriangleMesh(cube.vertices, cube.faces[:-1])

    def test_inconsistent_winding_rejected(self):
        cube = box_mesh(1.0, 1.0, 1.0)
        faces = cube.faces.copy()
        faces[0] = faces[0, ::-1]
        with pytest.raises(InvertedOrientation):
            TriangleMesh(cube.vertices, faces)

    def test_inward_mesh_is_flipped(self):
        cube = box_mesh(1.0, 1.0, 1.0)
        inverted = cube.faces[:, ::-1]
        mesh = TriangleMesh(cube.vertices, inverted)
        assert mesh.volume() == pytest.approx(1.0, rel=1e-12)

    def test_two_volume_accumulations_agree(self):
        mesh = icosphere(1.3, 3)
        a, b = mesh.volume(), mesh.volume_divergence()
        assert abs(a - b) / a < 1e-12

    def test_is_watertight(self):
        assert box_mesh(1, 1, 1).is_watertight()


class TestWelding:
    def test_jittered_vertices_weld(self):
        cube = box_mesh(1.0, 1.0, 1.0)
        # exploded triangle soup with jitter below the weld tolerance
        p0, p1, p2 = cube.corners()
        soup = np.concatenate([p0, p1, p2])
        rng = np.random.default_rng(3)
        soup = soup + rng.uniform(-1e-12, 1e-12, soup.shape)
        faces = np.arange(36).reshape(3, 12).T
        stl = mesh_to_stl(TriangleMesh(soup, faces, validate=False))
        mesh = load_mesh(stl)
        assert len(mesh.vertices) == 8

    def test_degenerate_bbox_rejected(self):
        with pytest.raises(ParseError):
            load_mesh(b"v 0 0 0\nv 0 0 0\nv 0 0 0\nf 1 2 3\nf 1 3 2\n")
