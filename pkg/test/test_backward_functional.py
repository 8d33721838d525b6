import pytest
import tripx
import tripx.functional as f
import numpy as np


def numgrad(func, x, h=1e-6):
    grad = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        up, down = x.copy(), x.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (func(up) - func(down)) / (2 * h)
    return grad


def test_add_broadcast_backward():
    a = np.random.rand(4, 3)
    b = np.random.rand(3)
    g = np.random.rand(4, 3)
    a_tensor = tripx.tensor(a, usegrad=True)
    b_tensor = tripx.tensor(b, usegrad=True)
    result_tensor = f.add(a_tensor, b_tensor)
    result_tensor.backward(tripx.tensor(g))

    expected_grad_a = numgrad(lambda x: np.sum(g * (x + b)), a)
    expected_grad_b = numgrad(lambda x: np.sum(g * (a + x)), b)

    assert a_tensor.grad is not None
    assert b_tensor.grad is not None
    np.testing.assert_allclose(a_tensor.grad.data, expected_grad_a, rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose(b_tensor.grad.data, expected_grad_b, rtol=1e-5, atol=1e-6)


def test_mul_broadcast_backward():
    a = np.random.rand(2, 4, 3)
    b = np.random.rand(4, 1)
    g = np.random.rand(2, 4, 3)
    a_tensor = tripx.tensor(a, usegrad=True)
    b_tensor = tripx.tensor(b, usegrad=True)
    result_tensor = f.mul(a_tensor, b_tensor)
    result_tensor.backward(tripx.tensor(g))

    expected_grad_a = numgrad(lambda x: np.sum(g * x * b), a)
    expected_grad_b = numgrad(lambda x: np.sum(g * a * x), b)

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad_a, rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose(b_tensor.grad.data, expected_grad_b, rtol=1e-5, atol=1e-6)


def test_div_backward():
    a = np.random.rand(3, 4)
    b = np.random.rand(3, 4) + 0.5
    a_tensor = tripx.tensor(a, usegrad=True)
    b_tensor = tripx.tensor(b, usegrad=True)
    result_tensor = f.div(a_tensor, b_tensor)
    result_tensor.backward(tripx.oneslike(result_tensor))

    expected_grad_a = numgrad(lambda x: np.sum(x / b), a)
    expected_grad_b = numgrad(lambda x: np.sum(a / x), b)

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad_a, rtol=1e-5, atol=1e-6)
    np.testing.assert_allclose(b_tensor.grad.data, expected_grad_b, rtol=1e-5, atol=1e-6)


def test_matmul_batched_backward():
    a = np.random.rand(2, 5, 3)
    b = np.random.rand(3, 4)
    a_tensor = tripx.tensor(a, usegrad=True)
    b_tensor = tripx.tensor(b, usegrad=True)
    result_tensor = f.matmul(a_tensor, b_tensor)
    result_tensor.backward(tripx.oneslike(result_tensor))

    expected_grad_a = np.matmul(np.ones((2, 5, 4)), b.T)
    expected_grad_b = np.sum(np.matmul(a.transpose(0, 2, 1), np.ones((2, 5, 4))), axis=0)

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad_a, rtol=1e-7, atol=1e-7)
    np.testing.assert_allclose(b_tensor.grad.data, expected_grad_b, rtol=1e-7, atol=1e-7)


def test_matmul_matrix_vector_backward():
    a = np.random.rand(5, 3)
    b = np.random.rand(3)
    g = np.random.rand(5)
    a_tensor = tripx.tensor(a, usegrad=True)
    b_tensor = tripx.tensor(b, usegrad=True)
    result_tensor = f.matmul(a_tensor, b_tensor)
    result_tensor.backward(tripx.tensor(g))

    np.testing.assert_allclose(a_tensor.grad.data, np.outer(g, b), rtol=1e-7, atol=1e-7)
    np.testing.assert_allclose(b_tensor.grad.data, a.T @ g, rtol=1e-7, atol=1e-7)


def test_exp_log_backward():
    a = np.random.rand(3, 4) + 0.1
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = f.log(f.exp(a_tensor) + 1.0)
    result_tensor.backward(tripx.oneslike(result_tensor))

    expected_grad = numgrad(lambda x: np.sum(np.log(np.exp(x) + 1.0)), a)

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad, rtol=1e-5, atol=1e-6)


def test_pow_backward():
    a = np.random.rand(4) + 0.5
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = f.pow(a_tensor, 3.0)
    result_tensor.backward(tripx.oneslike(result_tensor))

    np.testing.assert_allclose(a_tensor.grad.data, 3 * a**2, rtol=1e-7, atol=1e-7)


def test_sum_dim_keepdims_backward():
    a = np.random.rand(2, 3, 4)
    g = np.random.rand(2, 1, 4)
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = f.sum(a_tensor, 1, keepdims=True)
    result_tensor.backward(tripx.tensor(g))

    expected_grad = np.broadcast_to(g, a.shape)

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad, rtol=1e-7, atol=1e-7)


def test_mean_backward():
    a = np.random.rand(3, 5)
    g = np.random.rand(3)
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = f.mean(a_tensor, -1)
    result_tensor.backward(tripx.tensor(g))

    expected_grad = numgrad(lambda x: np.sum(g * np.mean(x, axis=-1)), a)

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad, rtol=1e-5, atol=1e-6)


def test_mean_scalar_output_backward():
    a = np.random.rand(2, 3, 4)
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = f.mean(a_tensor)
    result_tensor.backward()

    np.testing.assert_allclose(a_tensor.grad.data, np.full(a.shape, 1 / 24), rtol=1e-7, atol=1e-7)


def test_transpose_reshape_backward():
    a = np.random.rand(2, 3, 4)
    g = np.random.rand(4, 6)
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = f.reshape(f.transpose(a_tensor, 0, 2), (4, 6))
    result_tensor.backward(tripx.tensor(g))

    expected_grad = g.reshape(4, 3, 2).transpose(2, 1, 0)

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad, rtol=1e-7, atol=1e-7)


def test_unsqueeze_squeeze_backward():
    a = np.random.rand(3, 4)
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = f.squeeze(f.unsqueeze(a_tensor, 1), 1) * 2.0
    result_tensor.backward(tripx.oneslike(result_tensor))

    np.testing.assert_allclose(a_tensor.grad.data, np.full(a.shape, 2.0), rtol=1e-7, atol=1e-7)


def test_slice_basic_backward():
    a = np.random.rand(4, 5)
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = a_tensor[1:3, 2]
    result_tensor.backward(tripx.oneslike(result_tensor))

    expected_grad = np.zeros_like(a)
    expected_grad[1:3, 2] = 1.0

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad, rtol=1e-7, atol=1e-7)


def test_slice_repeated_index_backward():
    a = np.random.rand(4, 3)
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = a_tensor[np.array([0, 2, 0, 0])]
    result_tensor.backward(tripx.oneslike(result_tensor))

    expected_grad = np.zeros_like(a)
    expected_grad[0] = 3.0
    expected_grad[2] = 1.0

    np.testing.assert_allclose(a_tensor.grad.data, expected_grad, rtol=1e-7, atol=1e-7)


def test_concat_backward():
    a = np.random.rand(2, 3)
    b = np.random.rand(2, 4)
    g = np.random.rand(2, 7)
    a_tensor = tripx.tensor(a, usegrad=True)
    b_tensor = tripx.tensor(b, usegrad=True)
    result_tensor = f.concat((a_tensor, b_tensor), dim=-1)
    result_tensor.backward(tripx.tensor(g))

    np.testing.assert_allclose(a_tensor.grad.data, g[:, :3], rtol=1e-7, atol=1e-7)
    np.testing.assert_allclose(b_tensor.grad.data, g[:, 3:], rtol=1e-7, atol=1e-7)


def test_reused_tensor_accumulates_backward():
    a = np.random.rand(3)
    a_tensor = tripx.tensor(a, usegrad=True)
    result_tensor = f.sum(a_tensor * a_tensor + a_tensor)
    result_tensor.backward()

    np.testing.assert_allclose(a_tensor.grad.data, 2 * a + 1, rtol=1e-7, atol=1e-7)


def test_nograd_builds_no_graph():
    a_tensor = tripx.tensor(np.random.rand(3), usegrad=True)
    with tripx.nograd():
        result_tensor = a_tensor * 2.0
    assert result_tensor.gradfn is None
    assert not result_tensor.usegrad


def test_inplace_write_after_forward_is_rejected():
    a_tensor = tripx.tensor(np.random.rand(3), usegrad=True)
    result_tensor = f.sum(a_tensor * a_tensor)
    a_tensor.data = np.zeros(3)
    with pytest.raises(RuntimeError):
        result_tensor.backward()


def test_backward_needs_gradient_for_non_scalar():
    a_tensor = tripx.tensor(np.random.rand(2, 2), usegrad=True)
    result_tensor = a_tensor * 3.0
    with pytest.raises(ValueError):
        result_tensor.backward()
    with pytest.raises(ValueError):
        result_tensor.backward(tripx.oneslike(tripx.tensor(np.zeros(3))))
