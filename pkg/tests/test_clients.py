"""Fixture/HTTP client behavior, surface matching, volume features."""

import json
from datetime import date

import httpx
import pytest

from seogen.clients import (
    CatalogNerClient,
    FixtureNerClient,
    FixtureVolumeClient,
    HttpNerClient,
    HttpVolumeClient,
    NerEntity,
    volume_features,
)
from seogen.corpus import Article
from seogen.errors import TransportError, ValidationError
from seogen.textmatch import count_surface, find_surface

ARTICLE = Article(id="a1", title="Spiel in München", text="Der FC Bayern spielt in München.")


class TestTextMatch:
    def test_word_boundary(self):
        assert find_surface("Bayern", "FC Bayern siegt") == 3
        assert find_surface("Bayern", "Die Bayernliga ruht") is None
        assert find_surface("Bayern", "in Oberbayern") is None

    def test_umlauts_are_word_chars(self):
        text = "Özil und Müller spielen"
        assert find_surface("Özil", text) == 0
        assert find_surface("Müller", text) == 9
        # inside a longer umlaut word: no match
        assert find_surface("Müller", "Müllers Tor") is None

    def test_punctuation_is_boundary(self):
        assert find_surface("München", "Tor in München!") == 7
        assert find_surface("VfL", "(VfL) gewinnt") == 1

    def test_count(self):
        assert count_surface("Tor", "Tor um Tor, Tor!") == 3
        assert count_surface("Tor", "Tore im Motor") == 0
        assert count_surface("fehlt", "gar nichts") == 0


class TestFixtureNer:
    @pytest.fixture()
    def fixture_path(self, tmp_path):
        path = tmp_path / "ner.json"
        path.write_text(json.dumps({
            "a1": [
                {"surface": "FC Bayern", "relevance": 0.9, "tag": "ORG"},
                {"surface": "München", "relevance": 0.7, "tag": "LOC"},
            ],
            "a2": [{"surface": "Borussia Dortmund", "relevance": 0.8, "tag": "ORG"}],
        }), encoding="utf-8")
        return path

    def test_lookup_by_id(self, fixture_path):
        client = FixtureNerClient(fixture_path)
        ents = client.entities(ARTICLE)
        assert ents == [
            NerEntity("FC Bayern", 0.9, "ORG"),
            NerEntity("München", 0.7, "LOC"),
        ]

    def test_unknown_id_empty(self, fixture_path):
        client = FixtureNerClient(fixture_path)
        other = Article(id="zzz", title="t", text="x")
        assert client.entities(other) == []

    def test_fail_for_raises(self, fixture_path):
        client = FixtureNerClient(fixture_path, fail_for=["a1"])
        with pytest.raises(TransportError):
            client.entities(ARTICLE)

    def test_non_object_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ValidationError):
            FixtureNerClient(path)


class TestCatalogNer:
    CATALOG = [
        NerEntity("FC Bayern", 0.9, "ORG"),
        NerEntity("München", 0.7, "LOC"),
        NerEntity("Borussia Dortmund", 0.8, "ORG"),
    ]

    def test_scan_matches_only_present_surfaces(self):
        client = CatalogNerClient(self.CATALOG)
        ents = client.entities(ARTICLE)
        assert [e.surface for e in ents] == ["FC Bayern", "München"]

    def test_scan_respects_word_boundaries(self):
        client = CatalogNerClient([NerEntity("Bayern", 0.5, "LOC")])
        inside = Article(id="x", title="t", text="Die Bayernliga pausiert")
        assert client.entities(inside) == []

    def test_from_file(self, tmp_path):
        path = tmp_path / "catalog.json"
        path.write_text(json.dumps(
            [{"surface": "München", "relevance": 0.7, "tag": "LOC"}]
        ), encoding="utf-8")
        client = CatalogNerClient.from_file(path)
        assert [e.surface for e in client.entities(ARTICLE)] == ["München"]

    def test_from_file_rejects_object(self, tmp_path):
        path = tmp_path / "catalog.json"
        path.write_text("{}", encoding="utf-8")
        with pytest.raises(ValidationError):
            CatalogNerClient.from_file(path)

    def test_from_fixture_map_first_surface_wins(self, tmp_path):
        path = tmp_path / "ner.json"
        path.write_text(json.dumps({
            "a1": [{"surface": "München", "relevance": 0.7, "tag": "LOC"}],
            "a2": [{"surface": "München", "relevance": 0.2, "tag": "ORG"}],
        }), encoding="utf-8")
        client = CatalogNerClient.from_fixture_map(path)
        (ent,) = client.entities(ARTICLE)
        assert ent == NerEntity("München", 0.7, "LOC")


class TestFixtureVolumes:
    @pytest.fixture()
    def client(self, tmp_path):
        path = tmp_path / "volumes.json"
        path.write_text(json.dumps({
            "FC Bayern": [
                {"date": "2024-02-04", "volume": 40.0},
                {"date": "2024-02-01", "volume": 10.0},
            ],
        }), encoding="utf-8")
        return FixtureVolumeClient(path, fail_for=["kaputt"])

    def test_points_sorted(self, client):
        assert client.volumes("FC Bayern") == [
            (date(2024, 2, 1), 10.0),
            (date(2024, 2, 4), 40.0),
        ]

    def test_unknown_keyword_empty(self, client):
        assert client.volumes("Niemand") == []

    def test_fail_for(self, client):
        with pytest.raises(TransportError):
            client.volumes("kaputt")


class TestVolumeFeatures:
    SERIES = [(date(2024, 2, 1), 10.0), (date(2024, 2, 4), 40.0)]

    def test_empty_series(self):
        assert volume_features([], date(2024, 2, 4)) == (0.0, 0.0)

    def test_current_and_prior(self):
        vol, delta = volume_features(self.SERIES, date(2024, 2, 4))
        assert vol == 40.0
        assert delta == pytest.approx((40.0 - 10.0) / 10.0)

    def test_most_recent_at_or_before(self):
        vol, delta = volume_features(self.SERIES, date(2024, 2, 3))
        assert vol == 10.0
        # three days prior (1/31) has no data: prior 0, denominator floor 1
        assert delta == pytest.approx(10.0)

    def test_before_all_points(self):
        assert volume_features(self.SERIES, date(2024, 1, 1)) == (0.0, 0.0)

    def test_no_reference_date_uses_last_point(self):
        assert volume_features(self.SERIES, None) == volume_features(
            self.SERIES, date(2024, 2, 4)
        )

    def test_denominator_floor(self):
        series = [(date(2024, 2, 1), 0.5), (date(2024, 2, 4), 2.0)]
        vol, delta = volume_features(series, date(2024, 2, 4))
        assert vol == 2.0
        assert delta == pytest.approx((2.0 - 0.5) / 1.0)


class TestHttpClients:
    def test_ner_roundtrip(self):
        captured = {}

        def handler(request: httpx.Request) -> httpx.Response:
            captured["url"] = str(request.url)
            captured["payload"] = json.loads(request.content)
            return httpx.Response(200, json=[
                {"surface": "München", "relevance": 0.7, "tag": "LOC"},
            ])

        client = HttpNerClient("http://ner.test", transport=httpx.MockTransport(handler))
        ents = client.entities(ARTICLE)
        assert ents == [NerEntity("München", 0.7, "LOC")]
        assert captured["url"].endswith("/entities")
        assert captured["payload"] == {"id": "a1", "text": ARTICLE.text}

    def test_ner_http_error(self):
        transport = httpx.MockTransport(lambda req: httpx.Response(500))
        client = HttpNerClient("http://ner.test", transport=transport)
        with pytest.raises(TransportError):
            client.entities(ARTICLE)

    def test_volume_roundtrip_sorts(self):
        def handler(request: httpx.Request) -> httpx.Response:
            assert request.url.params["keyword"] == "FC Bayern"
            return httpx.Response(200, json=[
                {"date": "2024-02-04", "volume": 40.0},
                {"date": "2024-02-01", "volume": 10.0},
            ])

        client = HttpVolumeClient("http://vol.test", transport=httpx.MockTransport(handler))
        assert client.volumes("FC Bayern") == [
            (date(2024, 2, 1), 10.0),
            (date(2024, 2, 4), 40.0),
        ]

    def test_volume_http_error(self):
        transport = httpx.MockTransport(lambda req: httpx.Response(503))
        client = HttpVolumeClient("http://vol.test", transport=transport)
        with pytest.raises(TransportError):
            client.volumes("irgendwas")
