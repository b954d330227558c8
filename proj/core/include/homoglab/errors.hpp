#pragma once

#include <stdexcept>
#include <string>

namespace homoglab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A coefficient fails the ellipticity bound on the sampling grid.
class NonElliptic : public Error {
public:
    explicit NonElliptic(const std::string& what, double kappa)
        : Error(what), kappa_(kappa) {}
    double kappa() const noexcept { return kappa_; }

private:
    double kappa_;
};

/// A Krylov iteration hit its iteration cap before reaching tolerance.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Field used in the wrong representation, shape mismatch, bad parameter.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace homoglab
