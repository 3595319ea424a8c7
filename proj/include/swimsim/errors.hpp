#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace swimsim {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adjacent centers coincide (or an arm has vanishing length); the force term is undefined.
class DegenerateConfiguration : public Error {
public:
    DegenerateConfiguration(const std::string& what, int index) : Error(what), index_(index) {}
    int index() const { return index_; }

private:
    int index_;
};

/// The three points of a joint are (numerically) on one line.
class CollinearJoint : public Error {
public:
    CollinearJoint(const std::string& what, int joint) : Error(what), joint_(joint) {}
    int joint() const { return joint_; }

private:
    int joint_;
};

class BodyOutsideDomain : public Error {
public:
    BodyOutsideDomain(const std::string& what, int body) : Error(what), body_(body) {}
    int body() const { return body_; }

private:
    int body_;
};

class SolverDiverged : public Error {
public:
    SolverDiverged(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(std::vector<std::string> messages)
        : Error(join(messages)), messages_(std::move(messages)) {}
    const std::vector<std::string>& messages() const { return messages_; }

private:
    static std::string join(const std::vector<std::string>& m) {
        std::string out = "invalid configuration:";
        for (const auto& s : m) out += "\n  " + s;
        return out;
    }
    std::vector<std::string> messages_;
};

}  // namespace swimsim
