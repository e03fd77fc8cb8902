"""Tests pour les endpoints /v1."""

from fastapi.testclient import TestClient

from indexlab.main import app

client = TestClient(app)


def test_bound_costa_topology():
    """Genre 1, trois bouts plongés : 3 ≤ indice ≤ 11."""
    response = client.post("/v1/topology/bound", json={"genus": 1, "multiplicities": [1, 1, 1]})
    assert response.status_code == 200
    data = response.json()
    assert data["lower"] == "3"
    assert data["lower_ceil"] == 3
    assert data["upper"] == "11"
    assert data["topology"]["ends"] == 3


def test_bound_one_sided():
    response = client.post(
        "/v1/topology/bound", json={"genus": 0, "multiplicities": [3], "sided": "one"}
    )
    assert response.status_code == 200
    data = response.json()
    assert data["lower"] == "4/3"
    assert data["lower_ceil"] == 2
    assert data["upper"] is None


def test_bound_rejects_empty_multiplicities():
    response = client.post("/v1/topology/bound", json={"genus": 0, "multiplicities": []})
    assert response.status_code == 422


def test_sandwich_catenoid():
    response = client.post("/v1/topology/sandwich", json={"genus": 0, "multiplicities": [1, 1]})
    assert response.status_code == 200
    data = response.json()
    assert (data["lower"], data["upper"]) == ("1", "3")


def test_sandwich_costa():
    response = client.post("/v1/topology/sandwich", json={"genus": 1, "multiplicities": [1, 1, 1]})
    data = response.json()
    assert (data["lower"], data["upper"]) == ("7/3", "15")
    assert data["lower_float"] == 7 / 3


def test_enumerate_embedded_genus_one():
    """Budget 3, bouts plongés, au moins trois bouts et genre 1 : seule (1, [1, 1, 1])."""
    response = client.post(
        "/v1/topology/enumerate",
        json={"budget": 3, "embedded": True, "min_ends": 3, "min_genus": 1},
    )
    assert response.status_code == 200
    data = response.json()
    assert data["topologies"] == [
        {"genus": 1, "ends": 3, "multiplicities": [1, 1, 1], "sided": "two"}
    ]
    assert data["case_split"]


def test_dimension():
    response = client.post("/v1/forms/dimension", json={"genus": 1, "multiplicities": [1, 1, 1]})
    assert response.status_code == 200
    data = response.json()
    assert data["dimension"] == 12
    assert data["note"]
    assert data["decay"]["k_max"] == 1


def test_costa_parity():
    response = client.get("/v1/forms/costa-parity")
    assert response.status_code == 200
    data = response.json()
    assert data["dims"] == [2, 3, 3, 1]
    assert data["tilde"] == [2, 4, 4, 2]


def test_feasibility():
    response = client.post("/v1/forms/feasibility", json={"w": [2, 0, 0, 0]})
    assert response.status_code == 200
    data = response.json()
    assert not data["feasible"]
    assert len(data["violated"]) == 3
    assert data["replay"]["contradiction"] is True

    response = client.post("/v1/forms/feasibility", json={"w": [2, 0, 0, 1]})
    assert response.json()["feasible"]


def test_feasibility_wrong_length():
    response = client.post("/v1/forms/feasibility", json={"w": [1, 2, 3]})
    assert response.status_code == 422


def test_list_surfaces():
    response = client.get("/v1/surfaces")
    assert response.status_code == 200
    names = {item["name"] for item in response.json()}
    assert {"plane", "catenoid", "enneper", "costa"} <= names


def test_catenoid_ends():
    response = client.get("/v1/surfaces/catenoid/ends")
    assert response.status_code == 200
    data = response.json()
    assert data["topology"]["multiplicities"] == [1, 1]
    assert [end["multiplicity"] for end in data["ends"]] == [1, 1]


def test_unknown_surface():
    response = client.get("/v1/surfaces/helicoid/ends")
    assert response.status_code == 404
