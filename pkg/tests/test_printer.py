"""Canonical printing: exact layout for a small model, stable output."""

from srkit.dsl import parse, pretty_print

TINY = """\
project tiny "Quote \\" and \\\\ and tab\\t"

roles {
  lead: admin
}

screening {
  phases {
    triage: metadata
  }
  assign { mode manual reviewers 1 }
  conflict { strategy arbiter arbiter lead }
  validation { percent 33.5 target all validator lead }
  exclusion {
    "Off topic"
  }
}

classification {
  simple note "Free Note": text(100) pattern "[a-z ]+" * [3]
  list wheel "Wheel": ("spoke", "hub") depends on axle ("x" -> {"spoke"}, "y" -> {})
  dynamiclist axle "Axle": ("x", "y") [0] {
    simple why "Why": bool
  }
}
"""


def test_golden_layout():
    # Ordering within a category line: type, '*', '[n]', dependency, block.
    assert pretty_print(parse(TINY)).content == TINY


def test_integral_floats_print_without_decimal_point():
    src = TINY.replace("percent 33.5", "percent 25.0")
    assert "percent 25\n" not in src
    assert " percent 25 " in pretty_print(parse(src)).content


def test_printing_is_pure():
    model = parse(TINY)
    first = pretty_print(model).content
    assert pretty_print(model).content == first
    assert parse(first) == model


def test_origin_defaults():
    assert pretty_print(parse(TINY)).origin == "<printed>"
    assert pretty_print(parse(TINY), origin="x.relis").origin == "x.relis"
