"""Corpus parsing and paper intake."""

import pytest

from conftest import corpus_csv
from srkit.engine import E_FORBIDDEN, E_FORMAT, EngineError, parse_bibtex, parse_csv

BIB = """\
% bibliography export
@comment{ignore me}

@article{lamp2019,
  author = {Di Lampedusa, Gia and Strand, Mo},
  title = {The {B}ig {S}witch},
  journal = {Power Letters},
  year = 2019,
  doi = {10.5555/lamp},
}

@inproceedings{reed2021,
  author = "Reed, Ana",
  title = "Counting Joules",
  booktitle = "Proc. GreenSoft",
  year = "2021",
  url = {https://example.org/reed},
  abstract = {We count them.},
}
"""


# --- csv ------------------------------------------------------------------


def test_csv_golden_parse():
    rows, rejects = parse_csv(corpus_csv(2))
    assert rejects == []
    assert [r["line"] for r in rows] == [2, 3]
    first = rows[0]
    assert first["bibkey"] == "key001"
    assert first["title"] == "Paper number 1"
    assert first["authors"] == ["Doe", "Ray"]
    assert first["venue"] == "EnCo"
    assert first["year"] == 2011
    assert first["abstract"] == "About paper 1"
    assert first["link"] is None


def test_csv_header_is_mandatory():
    with pytest.raises(EngineError) as e:
        parse_csv("key,name\nk1,Title\n")
    assert e.value.code == E_FORMAT
    with pytest.raises(EngineError) as e:
        parse_csv("")
    assert e.value.code == E_FORMAT


def test_csv_quoted_commas_and_blank_lines():
    payload = (
        "bibkey,title,authors,venue,year,abstract,link\n"
        "\n"
        'k1,"Commas, everywhere",Doe,V,2020,,\n'
        "\n"
    )
    rows, rejects = parse_csv(payload)
    assert rejects == []
    assert rows[0]["title"] == "Commas, everywhere"


def test_csv_row_problems_reject_without_aborting():
    payload = (
        "bibkey,title,authors,venue,year,abstract,link\n"
        "k1,Good,One,V,2020,,\n"
        "k2,Short row,missing\n"
        "k3,,NoTitle,V,2020,,\n"
        ",Untagged,NoKey,V,2020,,\n"
        "k5,BadYear,A,V,soon,,\n"
        "k6,EarlyYear,A,V,1899,,\n"
        "k7,Fine,B,V,2100,,\n"
    )
    rows, rejects = parse_csv(payload)
    assert [r["bibkey"] for r in rows] == ["k1", "k7"]
    assert rejects == [
        (3, "wrong column count"),
        (4, "title required"),
        (5, "bibkey required"),
        (6, "year invalid"),
        (7, "year invalid"),
    ]


def test_csv_nul_byte_is_a_format_error():
    with pytest.raises(EngineError) as e:
        parse_csv("bibkey,title,authors,venue,year,abstract,link\nk\x001,T,A,V,2020,,\n")
    assert e.value.code == E_FORMAT


# --- bibtex ---------------------------------------------------------------


def test_bibtex_golden_parse():
    rows, rejects = parse_bibtex(BIB)
    assert rejects == []
    art, proc = rows
    assert art["line"] == 4 and art["bibkey"] == "lamp2019"
    assert art["title"] == "The Big Switch"  # protective braces removed
    assert art["authors"] == ["Di Lampedusa, Gia", "Strand, Mo"]
    assert art["venue"] == "Power Letters"
    assert art["year"] == 2019
    assert art["link"] == "https://doi.org/10.5555/lamp"
    assert art["abstract"] is None
    assert proc["bibkey"] == "reed2021"
    assert proc["venue"] == "Proc. GreenSoft"
    assert proc["link"] == "https://example.org/reed"  # url beats doi
    assert proc["abstract"] == "We count them."


def test_bibtex_rejects_per_entry():
    payload = (
        "@misc{web1, title={A Website}, year={2020}}\n"
        "@article{, title={No Key}, year={2020}}\n"
        "@article{nokey2}\n"
        "@article{bad2, title={No Year}}\n"
        "@article{bad3, year={2020}}\n"
        "@book{ok1, title={Fine}, year={2020}, publisher={Pub}}\n"
        "@article{bad1, title={never closed\n"
    )
    rows, rejects = parse_bibtex(payload)
    assert [r["bibkey"] for r in rows] == ["ok1"]
    assert rows[0]["venue"] == "Pub"
    reasons = dict(rejects)
    assert reasons[1] == "unsupported entry type @misc"
    assert reasons[2] == "entry key required"
    assert reasons[3] == "entry key required"
    assert reasons[4] == "year invalid"
    assert reasons[5] == "title required"
    assert reasons[7] == "unbalanced braces"


def test_bibtex_payload_level_errors():
    with pytest.raises(EngineError) as e:
        parse_bibtex("just prose, not a bibliography")
    assert e.value.code == E_FORMAT
    with pytest.raises(EngineError) as e:
        parse_bibtex("   \n  ")
    assert e.value.code == E_FORMAT


def test_bibtex_bare_values_and_whitespace():
    rows, _ = parse_bibtex("@article{k, title = Bare Title , year = 2020\n}")
    assert rows[0]["title"] == "Bare Title"
    assert rows[0]["year"] == 2020


# --- engine intake --------------------------------------------------------


def test_import_counts_and_persists(bench):
    out = bench.engine.import_papers(bench.project, corpus_csv(5), "csv", bench.admin)
    assert out == {"imported": 5, "rejected": []}
    rows, total = bench.engine.list_papers(bench.project)
    assert total == 5
    assert rows[0]["payload"]["bibkey"] == "key001"


def test_import_deduplicates_on_bibkey_and_title(bench):
    bench.engine.import_papers(bench.project, corpus_csv(3), "csv", bench.admin)
    again = bench.engine.import_papers(bench.project, corpus_csv(3), "csv", bench.admin)
    assert again["imported"] == 0
    assert [r[1] for r in again["rejected"]] == ["duplicate bibkey"] * 3
    retitled = (
        "bibkey,title,authors,venue,year,abstract,link\n"
        "fresh1,paper NUMBER 1?,Doe,V,2011,,\n"  # same title+year, new key
        "fresh2,Paper number 9,Doe,V,2019,,\n"
    )
    out = bench.engine.import_papers(bench.project, retitled, "csv", bench.admin)
    assert out["imported"] == 1
    assert out["rejected"] == [[2, "duplicate title+year"]]


def test_import_rejects_are_sorted_by_line(bench):
    payload = (
        "bibkey,title,authors,venue,year,abstract,link\n"
        "k1,First,A,V,2020,,\n"
        "k2,Bad,A,V,never,,\n"
        "k1,First,A,V,2020,,\n"
    )
    out = bench.engine.import_papers(bench.project, payload, "csv", bench.admin)
    assert out["imported"] == 1
    assert out["rejected"] == [[3, "year invalid"], [4, "duplicate bibkey"]]


def test_import_needs_admin_rank(bench):
    with pytest.raises(EngineError) as e:
        bench.engine.import_papers(bench.project, corpus_csv(1), "csv", "ana")
    assert e.value.code == E_FORBIDDEN
    with pytest.raises(EngineError) as e:
        bench.engine.import_papers(bench.project, corpus_csv(1), "csv", "vera")
    assert e.value.code == E_FORBIDDEN


def test_import_bibtex_through_the_engine(bench):
    out = bench.engine.import_papers(bench.project, BIB, "bibtex", bench.admin)
    assert out["imported"] == 2
    with pytest.raises(EngineError) as e:
        bench.engine.import_papers(bench.project, BIB, "ris", bench.admin)
    assert e.value.code == E_FORMAT
