#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rf {

using Complex = std::complex<double>;

// Flat 0-based position of component (k, q), k = 0..2j, q = -k..k; the
// serialized convention is this plus one.
constexpr int tensor_index(int k, int q) { return k * k + k + q; }

struct KQ {
    int k = 0;
    int q = 0;
    friend bool operator==(const KQ&, const KQ&) = default;
};

// Inverse of tensor_index: k is the integer square root of i.
constexpr KQ tensor_kq_from_index(int i) {
    int k = 0;
    while ((k + 1) * (k + 1) <= i) ++k;
    return {k, i - k * k - k};
}

// Expansion coefficients c_kq of one operator on the unit-tensor basis of
// the spin space with dimension two_j + 1; densely stored over the full
// (2j+1)^2 component box.
class TensorCoefficients {
  public:
    TensorCoefficients() = default;
    TensorCoefficients(int two_j, std::string label = {})
        : two_j_(two_j), label_(std::move(label)),
          c_(static_cast<size_t>(two_j + 1) * (two_j + 1)) {
        if (two_j < 0) throw std::invalid_argument("TensorCoefficients: two_j < 0");
    }

    int two_j() const { return two_j_; }
    int dim() const { return two_j_ + 1; }
    int size() const { return static_cast<int>(c_.size()); }
    int max_order() const { return two_j_; }  // largest k
    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    const Complex& at(int k, int q) const { return c_[checked_index(k, q)]; }
    void set(int k, int q, Complex v) { c_[checked_index(k, q)] = v; }

    const std::vector<Complex>& raw() const { return c_; }
    std::vector<Complex>& raw() { return c_; }

  private:
    size_t checked_index(int k, int q) const {
        if (k < 0 || k > two_j_ || q < -k || q > k)
            throw std::out_of_range("TensorCoefficients: (k,q) outside component box");
        return static_cast<size_t>(tensor_index(k, q));
    }

    int two_j_ = 0;
    std::string label_;
    std::vector<Complex> c_{Complex(0.0)};
};

// The vector v with v_i = c_kq / sqrt(2k+1), i = tensor_index(k,q); the
// serialized convention shifts the index by one.
class FrameVector {
  public:
    FrameVector() = default;
    FrameVector(int two_j, std::string label = {})
        : two_j_(two_j), label_(std::move(label)),
          v_(static_cast<size_t>(two_j + 1) * (two_j + 1)) {
        if (two_j < 0) throw std::invalid_argument("FrameVector: two_j < 0");
    }

    int two_j() const { return two_j_; }
    int dim() const { return two_j_ + 1; }
    int size() const { return static_cast<int>(v_.size()); }
    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    const Complex& operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    Complex& operator[](int i) { return v_[static_cast<size_t>(i)]; }

    const std::vector<Complex>& raw() const { return v_; }

    // Hermitian product conj(this) . other.
    Complex dot(const FrameVector& other) const {
        Complex s(0.0);
        for (size_t i = 0; i < v_.size(); ++i) s += std::conj(v_[i]) * other.v_[i];
        return s;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const Complex& z : v_) s += std::norm(z);
        return s;
    }

  private:
    int two_j_ = 0;
    std::string label_;
    std::vector<Complex> v_{Complex(0.0)};
};

}  // namespace rf
