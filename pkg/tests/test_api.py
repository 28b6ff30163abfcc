import pytest
from fastapi.testclient import TestClient

from api import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


class TestAlgebraRoutes:
    def test_normal_order(self, client):
        response = client.post("/algebra/normal-order", json={"expr": "b*bd"})
        assert response.status_code == 200
        body = response.json()
        assert body["command"] == "normal-order"
        assert body["result"] == "q^2*bd*b + eta2"
        assert body["params"]["alphabet"] == "oscillator"

    def test_q_commutator(self, client):
        response = client.post("/algebra/q-commutator", json={"left": "b", "right": "bd"})
        assert response.json()["result"] == "eta2"

    def test_star(self, client):
        response = client.post("/algebra/star", json={"left": "z", "right": "zb"})
        assert response.json()["result"] == "q^2*zb*z + eta2"

    def test_q_poisson(self, client):
        response = client.post("/algebra/q-poisson", json={"left": "z", "right": "zb"})
        assert response.json()["result"] == "i"

    def test_kernel_components(self, client):
        response = client.post("/algebra/kernel", json={"expr": "b*bd", "order": 4})
        components = response.json()["result"]["components"]
        assert {(c["p"], c["r"], c["s"]) for c in components} == {(0, 1, 1), (0, 0, 0)}

    def test_kernel_order_below_degree_is_422(self, client):
        response = client.post("/algebra/kernel", json={"expr": "b^3", "order": 2})
        assert response.status_code == 422

    def test_integrate(self, client):
        response = client.post("/algebra/integrate", json={"expr": "zb*z"})
        assert response.json()["result"] == "q^-2"

    def test_domain_error_is_422(self, client):
        response = client.post("/algebra/normal-order", json={"expr": "b*x"})
        assert response.status_code == 422
        assert "x" in response.json()["detail"]

    def test_missing_field_is_422(self, client):
        assert client.post("/algebra/commutator", json={"left": "b"}).status_code == 422


class TestNumericRoutes:
    def test_spectrum(self, client):
        response = client.post("/numerics/spectrum", json={"dim": 8})
        body = response.json()
        assert response.status_code == 200
        assert body["passed"] is True
        assert len(body["result"]) == 8

    def test_spectrum_validates_dimension(self, client):
        assert client.post("/numerics/spectrum", json={"dim": 1}).status_code == 422

    def test_phi(self, client):
        response = client.post("/numerics/phi", json={"q": 0.5, "x": [0.0]})
        assert response.json()["result"][0]["phi"] == pytest.approx(0.25)

    def test_phi_domain_error(self, client):
        assert client.post("/numerics/phi", json={"q": 1.5, "x": [0.0]}).status_code == 422

    def test_action_residual(self, client):
        grid = [i / 10 for i in range(50)]
        response = client.post("/numerics/action-residual", json={"q": 0.5, "grid": grid, "rho": 1.3})
        body = response.json()
        assert response.status_code == 200
        assert body["passed"] is True
        assert body["residuals"]["max_residual"] == 0.0

    def test_verify(self, client):
        body = client.get("/numerics/verify/qarith").json()
        assert body["passed"] is True
        assert {row["suite"] for row in body["result"]} == {"qarith"}

    def test_unknown_suite(self, client):
        assert client.get("/numerics/verify/nothing").status_code == 422
