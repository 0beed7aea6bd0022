import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cml.errors import PathHitsDiscriminant, TrackingAmbiguity
from cml.monodromy import (
    KLEIN_FOUR,
    S4_BASEPOINT,
    CoefficientPath,
    Permutation,
    certify_exceptional_surjection,
    elementary_braid_loop,
    generated_group,
    induced_homomorphism,
    loop_permutation,
    push_forward,
    track_path,
)
from cml.poly_core import Configuration, MonicPolynomial, from_roots, same_points
from cml.poly_maps import resolve_quartic

perms4 = st.permutations(range(4)).map(lambda p: Permutation(tuple(p)))


def z2_circle(samples=64, turns=1):
    wps = [MonicPolynomial((0j, -complex(np.exp(2j * np.pi * turns * k / 32)))) for k in range(33)]
    wps[-1] = wps[0]
    return CoefficientPath(tuple(wps), samples)


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((0, 0, 1))

    def test_composition_order(self):
        p = Permutation((1, 2, 0))
        q = Permutation.transposition(3, 0, 1)
        assert (p * q)(0) == p(q(0))
        assert p.then(q) == q * p

    @given(perms4, perms4, perms4)
    def test_group_axioms(self, p, q, r):
        assert (p * q) * r == p * (q * r)
        assert p * p.inverse() == Permutation.identity(4)
        assert (p * Permutation.identity(4)) == p

    def test_cycles(self):
        assert Permutation((1, 0, 3, 2)).cycles() == [(0, 1), (2, 3)]
        assert Permutation.identity(3).cycles() == []


class TestPath:
    def test_rejects_discriminant_waypoint(self):
        with pytest.raises(PathHitsDiscriminant):
            CoefficientPath((MonicPolynomial((0j, -1 + 0j)), MonicPolynomial((0j, 0j))))

    def test_rejects_mixed_degrees(self):
        with pytest.raises(ValueError):
            CoefficientPath((MonicPolynomial((0j,)), MonicPolynomial((0j, 1 + 0j))))

    def test_json_round_trip(self):
        p = z2_circle()
        q = CoefficientPath.from_json(json.loads(json.dumps(p.to_json())))
        assert q.waypoints == p.waypoints and q.samples_per_segment == p.samples_per_segment

    def test_concatenation_needs_matching_ends(self):
        a = CoefficientPath((MonicPolynomial((0j, -1 + 0j)), MonicPolynomial((0j, -2 + 0j))))
        with pytest.raises(ValueError):
            a + a


class TestTracking:
    def test_constant_path(self):
        f = MonicPolynomial((0j, -1 + 0j))
        start = Configuration((1 + 0j, -1 + 0j), ordered=True)
        res = track_path(CoefficientPath((f, f)), start)
        assert res.end.points == start.points

    def test_z2_circle_swaps_against_closed_form(self):
        path = z2_circle()
        res = track_path(path, Configuration((1 + 0j, -1 + 0j), ordered=True))
        assert same_points(res.end.points, [-1, 1], 1e-9)
        assert abs(res.end.points[0] + 1) < 1e-9

    def test_half_way_matches_closed_form(self):
        wps = [MonicPolynomial((0j, -complex(np.exp(1j * np.pi * k / 16)))) for k in range(17)]
        res = track_path(CoefficientPath(tuple(wps)), Configuration((1 + 0j, -1 + 0j), ordered=True))
        # root 1 follows e^{pi i t}; at t = 1/2 of the full loop it sits at i
        assert abs(res.end.points[0] - 1j) < 1e-9

    def test_crossing_the_discriminant_is_refused(self):
        path = CoefficientPath((MonicPolynomial((0j, -1 + 0j)), MonicPolynomial((0j, 1 + 0j))))
        with pytest.raises((PathHitsDiscriminant, TrackingAmbiguity)):
            track_path(path, Configuration((1 + 0j, -1 + 0j), ordered=True))

    def test_wrong_start_rejected(self):
        with pytest.raises(ValueError):
            track_path(z2_circle(), Configuration((2 + 0j, -1 + 0j), ordered=True))


class TestLoops:
    def test_constant_loop_is_identity(self):
        f = from_roots([0, 1, 2j])
        assert loop_permutation(CoefficientPath((f, f))).permutation.is_identity()

    def test_z2_circle(self):
        assert loop_permutation(z2_circle()).permutation == Permutation((1, 0))

    def test_open_path_rejected(self):
        a = CoefficientPath((MonicPolynomial((0j, -1 + 0j)), MonicPolynomial((0j, -2 + 0j))))
        with pytest.raises(ValueError):
            loop_permutation(a)

    def test_braid_n2(self):
        loop = elementary_braid_loop(2, 1, Configuration((-1 + 0j, 1 + 0j)))
        assert loop_permutation(loop).permutation == Permutation((1, 0))

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_braid_generators_are_adjacent_transpositions(self, i):
        loop = elementary_braid_loop(4, i, S4_BASEPOINT)
        assert loop_permutation(loop).permutation == Permutation.transposition(4, i - 1, i)

    def test_full_twist_is_identity(self):
        loop = elementary_braid_loop(4, 2, S4_BASEPOINT)
        assert loop_permutation(loop + loop).permutation.is_identity()

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_sampling_invariance(self, i):
        loop = elementary_braid_loop(4, i, S4_BASEPOINT, samples_per_segment=16)
        assert loop_permutation(loop).permutation == loop_permutation(loop.refined(2)).permutation

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_inverse_law(self, i):
        loop = elementary_braid_loop(4, i, S4_BASEPOINT)
        fwd = loop_permutation(loop).permutation
        assert loop_permutation(loop.reversed()).permutation == fwd.inverse()

    def test_concatenation_law(self):
        s1 = elementary_braid_loop(4, 1, S4_BASEPOINT)
        s2 = elementary_braid_loop(4, 2, S4_BASEPOINT)
        p1, p2 = loop_permutation(s1).permutation, loop_permutation(s2).permutation
        both = loop_permutation(s1 + s2).permutation
        assert both == p1.then(p2)
        assert both != p2.then(p1)

    def test_basepoint_validation(self):
        with pytest.raises(ValueError):
            elementary_braid_loop(3, 1, Configuration((0j, 2 + 0j, 1 + 0j)))
        with pytest.raises(ValueError):
            elementary_braid_loop(3, 3, Configuration((0j, 1 + 0j, 2 + 0j)))


class TestResolventMonodromy:
    def test_sigma1_and_sigma3_images_agree(self):
        images = []
        for i in (1, 3):
            loop = elementary_braid_loop(4, i, S4_BASEPOINT)
            image = push_forward(loop, lambda f: resolve_quartic(f).output)
            images.append(loop_permutation(image).permutation)
        assert images[0] == images[1]
        assert len(images[0].cycles()) == 1 and len(images[0].cycles()[0]) == 2

    def test_square_of_image_is_trivial(self):
        loop = elementary_braid_loop(4, 2, S4_BASEPOINT)
        image = push_forward(loop, lambda f: resolve_quartic(f).output)
        assert loop_permutation(image + image).permutation.is_identity()

    def test_homomorphism_from_algebra(self):
        # the exact S4 -> S3 map on generators, independent of any tracking
        src = [Permutation.transposition(4, i, i + 1) for i in range(3)]
        tgt = [Permutation((1, 0, 2)), Permutation((0, 2, 1)), Permutation((1, 0, 2))]
        table = induced_homomorphism(src, tgt)
        assert len(table) == 24 and len(generated_group(tgt)) == 6
        assert frozenset(g for g, h in table.items() if h == (0, 1, 2)) == KLEIN_FOUR

    def test_full_certificate(self):
        cert = certify_exceptional_surjection()
        assert cert.passed
        names = {c.name for c in cert.checks}
        assert {"a_images_generate_S3", "b_kernel_is_klein_four", "c_squares_trivial"} <= names
        sep = next(c for c in cert.checks if c.name == "min_separation_along_paths")
        assert sep.measured > 10 * 1e-9
