import time

import pytest
from fastapi.testclient import TestClient

from vdconf.server import create_app


@pytest.fixture()
def client(tshirt_space):
    with TestClient(create_app(tshirt_space)) as c:
        yield c


def new_session(client):
    response = client.post("/sessions")
    assert response.status_code == 201
    return response.json()["id"]


def domain_flags(state, variable):
    (group,) = [d for d in state["domains"] if d["variable"] == variable]
    return {entry["value"]: entry["valid"] for entry in group["values"]}


class TestModelEndpoint:
    def test_exposes_variables_and_labels(self, client):
        body = client.get("/model").json()
        assert body == {
            "variables": [
                {"name": "color", "values": ["black", "white", "red", "blue"]},
                {"name": "size", "values": ["small", "medium", "large"]},
                {"name": "print", "values": ["MIB", "STW"]},
            ]
        }


class TestSessionLifecycle:
    def test_fresh_state(self, client):
        sid = new_session(client)
        state = client.get(f"/sessions/{sid}").json()
        assert state["solutionCount"] == "11"
        assert state["complete"] is False
        assert state["assignments"] == []
        assert state["forced"] == []
        for group in state["domains"]:
            assert all(entry["valid"] for entry in group["values"])

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/missing").status_code == 404
        assert (
            client.post("/sessions/missing/assign",
                        json={"variable": "size", "value": "small"}).status_code
            == 404
        )

    def test_delete_then_404(self, client):
        sid = new_session(client)
        assert client.delete(f"/sessions/{sid}").status_code == 204
        assert client.get(f"/sessions/{sid}").status_code == 404
        assert client.delete(f"/sessions/{sid}").status_code == 404

    def test_idle_eviction(self, tshirt_space):
        with TestClient(create_app(tshirt_space, ttl_seconds=0.0)) as client:
            sid = new_session(client)
            time.sleep(0.01)
            assert client.get(f"/sessions/{sid}").status_code == 404


class TestAssign:
    def test_small_completes_with_forced(self, client):
        sid = new_session(client)
        state = client.post(
            f"/sessions/{sid}/assign", json={"variable": "size", "value": "small"}
        ).json()
        assert state["complete"] is True
        assert state["solutionCount"] == "1"
        assert state["assignments"] == [{"variable": "size", "value": "small"}]
        assert {f["variable"]: f["value"] for f in state["forced"]} == {
            "color": "black",
            "print": "MIB",
        }
        assert domain_flags(state, "color") == {
            "black": True, "white": False, "red": False, "blue": False,
        }

    def test_invalid_value_422_with_reason(self, client):
        sid = new_session(client)
        client.post(f"/sessions/{sid}/assign", json={"variable": "print", "value": "STW"})
        response = client.post(
            f"/sessions/{sid}/assign", json={"variable": "size", "value": "small"}
        )
        assert response.status_code == 422
        body = response.json()
        assert body["error"] == "value-not-valid"
        assert body["variable"] == "size"
        assert body["value"] == "small"
        # rejected without state change
        state = client.get(f"/sessions/{sid}").json()
        assert state["assignments"] == [{"variable": "print", "value": "STW"}]

    def test_already_assigned_409(self, client):
        sid = new_session(client)
        client.post(f"/sessions/{sid}/assign", json={"variable": "color", "value": "red"})
        response = client.post(
            f"/sessions/{sid}/assign", json={"variable": "color", "value": "blue"}
        )
        assert response.status_code == 409
        assert response.json()["error"] == "already-assigned"

    def test_unknown_names_422(self, client):
        sid = new_session(client)
        assert (
            client.post(f"/sessions/{sid}/assign",
                        json={"variable": "fabric", "value": "wool"}).status_code
            == 422
        )
        assert (
            client.post(f"/sessions/{sid}/assign",
                        json={"variable": "color", "value": "green"}).status_code
            == 422
        )

    def test_malformed_body_400(self, client):
        sid = new_session(client)
        assert (
            client.post(f"/sessions/{sid}/assign", json={"variable": "color"}).status_code
            == 400
        )
        assert (
            client.post(
                f"/sessions/{sid}/assign",
                content=b"not json",
                headers={"content-type": "application/json"},
            ).status_code
            == 400
        )

    def test_stw_flags(self, client):
        sid = new_session(client)
        state = client.post(
            f"/sessions/{sid}/assign", json={"variable": "print", "value": "STW"}
        ).json()
        assert state["solutionCount"] == "8"
        assert domain_flags(state, "size") == {
            "small": False, "medium": True, "large": True,
        }
        assert domain_flags(state, "color") == {
            "black": True, "white": True, "red": True, "blue": True,
        }


class TestUndo:
    def test_undo_reverts(self, client):
        sid = new_session(client)
        before = client.get(f"/sessions/{sid}").json()
        client.post(f"/sessions/{sid}/assign", json={"variable": "size", "value": "small"})
        after = client.post(f"/sessions/{sid}/undo").json()
        assert after == before

    def test_undo_empty_409(self, client):
        sid = new_session(client)
        response = client.post(f"/sessions/{sid}/undo")
        assert response.status_code == 409
        assert response.json()["error"] == "nothing-to-undo"


class TestDeterminism:
    def test_same_requests_same_responses(self, client):
        script = [
            {"variable": "print", "value": "STW"},
            {"variable": "color", "value": "blue"},
        ]

        def run():
            sid = new_session(client)
            out = [client.get(f"/sessions/{sid}").json()]
            for body in script:
                out.append(client.post(f"/sessions/{sid}/assign", json=body).json())
            out.append(client.post(f"/sessions/{sid}/undo").json())
            return out

        assert run() == run()

    def test_sessions_are_independent(self, client):
        a, b = new_session(client), new_session(client)
        client.post(f"/sessions/{a}/assign", json={"variable": "size", "value": "small"})
        state_b = client.get(f"/sessions/{b}").json()
        assert state_b["solutionCount"] == "11"
        assert state_b["assignments"] == []
