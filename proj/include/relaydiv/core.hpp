// SPDX-License-Identifier: Apache-2.0
//
// relaydiv: diversity analysis toolkit for half-duplex linear relay networks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relaydiv
{

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// ----- Error taxonomy -----------------------------------------------------

class InvalidParameter : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A relay matrix broke G G^H = I/N. Carries the offending index (0-based) and
// the largest elementwise deviation.
class SchemeInvalid : public InvalidParameter
{
public:
    SchemeInvalid(std::size_t index, double deviation)
        : InvalidParameter("relay matrix " + std::to_string(index + 1) +
                           " violates G*G^H = I/N (max deviation " + std::to_string(deviation) + ")"),
          index_(index), deviation_(deviation)
    {
    }

    std::size_t index() const noexcept { return index_; }
    double deviation() const noexcept { return deviation_; }

private:
    std::size_t index_;
    double deviation_;
};

class ResourceLimit : public std::runtime_error
{
public:
    ResourceLimit(const std::string &what, double required, double allowed)
        : std::runtime_error(what + " (required " + std::to_string(required) + ", allowed " +
                             std::to_string(allowed) + ")"),
          required_(required), allowed_(allowed)
    {
    }

    double required() const noexcept { return required_; }
    double allowed() const noexcept { return allowed_; }

private:
    double required_;
    double allowed_;
};

class InternalConsistency : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

class InsufficientData : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string &source, std::size_t line, std::size_t column, const std::string &message)
        : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column)
    {
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// ----- SNR ------------------------------------------------------------------

// Linear SNR rho > 0. Keeps the dB value it was built from so CSV columns
// reproduce the configured grid exactly.
class Snr
{
public:
    static Snr from_db(double db)
    {
        if (!std::isfinite(db))
            throw InvalidParameter("SNR in dB must be finite");
        return Snr(std::pow(10.0, db / 10.0), db);
    }

    static Snr from_linear(double rho)
    {
        if (!(rho > 0.0) || !std::isfinite(rho))
            throw InvalidParameter("SNR must be positive and finite");
        return Snr(rho, 10.0 * std::log10(rho));
    }

    double linear() const noexcept { return linear_; }
    double db() const noexcept { return db_; }
    double log2() const noexcept { return std::log2(linear_); }

private:
    Snr(double linear, double db) : linear_(linear), db_(db) {}

    double linear_;
    double db_;
};

// ----- Small numerical helpers ----------------------------------------------

inline constexpr double kEigenClampTolerance = 1e-10;

// Eigenvalues (ascending) of a Hermitian PSD matrix. Round-off negatives above
// -1e-10 are clamped to zero; anything more negative means the input was not PSD.
inline RVector psd_eigenvalues(const CMatrix &hermitian)
{
    if (hermitian.size() == 0)
        return RVector();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw InternalConsistency("Hermitian eigensolver failed to converge");
    RVector ev = solver.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
    {
        if (ev[i] < -kEigenClampTolerance)
            throw InternalConsistency("PSD matrix has eigenvalue " + std::to_string(ev[i]));
        if (ev[i] < 0.0)
            ev[i] = 0.0;
    }
    return ev;
}

inline void require(bool condition, const std::string &message)
{
    if (!condition)
        throw InvalidParameter(message);
}

} // namespace relaydiv
