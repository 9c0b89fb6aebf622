#pragma once

#include "crrigid/reflection.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace crr {

// Expression tree of the input format.
struct Expr {
    enum class Kind { Number, Imag, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
    Kind kind = Kind::Number;
    std::string text; // number literal, variable or function name
    int exponent = 0; // Pow
    std::vector<std::shared_ptr<const Expr>> args;
    int line = 0, col = 0;
};
using ExprPtr = std::shared_ptr<const Expr>;

std::string printExpr(const ExprPtr &e);
ExprPtr parseExpr(const std::string &text, int line = 1, int col = 1);

struct Equation {
    ExprPtr lhs, rhs;
};

struct FieldSpec {
    std::string name;
    std::array<ExprPtr, 3> components;
};

struct ProblemSpec {
    std::string title;
    std::vector<std::string> vars{"z", "w"};
    std::vector<std::string> tvars{"z1", "z2", "w"};
    std::vector<std::pair<std::string, ExprPtr>> lets;
    std::optional<Equation> source;
    std::optional<int> hyperquadricSign; // target: hyperquadric +-1
    std::optional<Equation> target;
    std::optional<std::array<ExprPtr, 3>> map;
    std::vector<FieldSpec> fields;
    std::string command;                           // default command for reproduce
    std::vector<std::pair<std::string, std::string>> expect;
    std::map<std::string, int> options;            // order, cond-order, window, map-order, work-order
};

ProblemSpec parseProblem(const std::string &text);
ProblemSpec parseProblemFile(const std::string &path);
std::string printProblem(const ProblemSpec &spec);

// Numeric settings used when turning a spec into series data.
struct BuildSettings {
    int mapOrder = 90;   // expansion order of rational map components
    int fieldOrder = 30; // expansion order of rational field components
    int workOrder = 46;  // normal-coordinate order for non-rigid sources
};

struct Problem {
    SourceHypersurface source;
    bool hasSource = false;
    bool sourceChanged = false; // g != 0: the map is rewritten in normal coordinates
    TargetHypersurface target;
    bool hasTarget = false;
    MapGerm map;          // in the normal coordinates of the source
    MapGerm inputMap;     // as written
    bool hasMap = false;
    std::vector<DeformationField> fields;
};

// Overrides let-constants by name (e.g. from --set t=2); values are expressions.
Problem buildProblem(const ProblemSpec &spec, const BuildSettings &settings,
                     const std::map<std::string, std::string> &overrides = {});

// Evaluates a holomorphic expression in the source variables over vs::zw().
Series evalHolomorphic(const ProblemSpec &spec, const ExprPtr &e, int order,
                       const std::map<std::string, std::string> &overrides = {});

} // namespace crr
