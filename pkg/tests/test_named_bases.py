import numpy as np
import pytest

from equivariant.hom_spaces import dim_hom_bilinear, dim_hom_lambda3
from equivariant.hom_spaces import dim_hom_m_to_lambda2 as dim_hom_lambda2
from equivariant.named_bases import match_named_generators, named_generators
from utils.exceptions import UsageError


@pytest.mark.parametrize("frame_name, bilinear, three_forms", [
    ("sp1_frame", 63, 10),
    ("sp2_frame", 63, 10),
    ("su3_frame", 99, 13),
])
def test_named_counts(request, frame_name, bilinear, three_forms):
    frame = request.getfixturevalue(frame_name)
    labels, tensors = named_generators(frame, "bilinear")
    assert len(labels) == len(tensors) == bilinear
    labels, tensors = named_generators(frame, "lambda3")
    assert len(labels) == len(tensors) == three_forms


def test_named_three_forms_are_alternating(su3_frame):
    _, forms = named_generators(su3_frame, "lambda3")
    assert np.allclose(forms, -forms.transpose(0, 2, 1, 3))
    assert np.allclose(forms, -forms.transpose(0, 1, 3, 2))


@pytest.mark.parametrize("frame_name", ["sp1_frame", "su3_frame", "g2_frame"])
def test_named_generators_fit_numeric_basis(request, frame_name):
    frame = request.getfixturevalue(frame_name)
    for result in (dim_hom_bilinear(frame.pair), dim_hom_lambda3(frame.pair)):
        report = match_named_generators(frame, result)
        assert report.passed, report.to_dict()
        assert report.rank == report.named == report.dimension
        assert report.coefficients.shape == (report.named, report.dimension)


def test_lambda2_has_no_named_set(sp1_frame):
    with pytest.raises(UsageError):
        match_named_generators(sp1_frame, dim_hom_lambda2(sp1_frame.pair))


def test_result_from_another_space(sp1_frame, sp2_pair):
    with pytest.raises(UsageError):
        match_named_generators(sp1_frame, dim_hom_lambda3(sp2_pair))
