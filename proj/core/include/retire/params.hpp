#pragma once

namespace retire {

/// Market and preference inputs. Field names follow the JSON config keys.
struct ModelParams {
    double delta = 0.6;    ///< consumption weight in u(c,l)
    double k = 3.0;        ///< risk aversion, k > 1
    double r = 0.02;
    double mu = 0.07;
    double sigma = 0.15;
    double gamma = 0.1;    ///< subjective discount rate
    double d = 0.3;        ///< debt repayment rate
    double w = 1.5;        ///< wage rate
    double L_bar = 1.0;    ///< total leisure endowment
    double L = 0.8;        ///< leisure cap while working
    double R_pre = 0.0;
    double R_post = 15.0;
};

/// The base parameter set used throughout the sensitivity analysis.
inline ModelParams baseline() { return {}; }

/// Closed-form constants shared by every downstream module.
struct DerivedConstants {
    double theta;        ///< market price of risk (mu - r) / sigma
    double a;            ///< utility exponent delta (1 - k), negative
    double n1;           ///< negative root of the characteristic polynomial
    double n2;           ///< root above one
    double p1;           ///< particular exponent a / (a - 1), leisure pinned at L
    double p2;           ///< particular exponent (k - 1) / k, interior leisure
    double K1;           ///< Merton consumption constant
    double Gamma1;       ///< characteristic value at p1
    double Gamma2;       ///< characteristic value at p2
    double A1;
    double A2;
    double y_tilde;      ///< leisure kink of the pre-retirement dual utility
    double L_bar_pow;    ///< L_bar^((1-k)(1-delta)/(1-a)), post-retirement scale
    double floor_pre;    ///< (d - w L_bar) / r
    double floor_post;   ///< d / r
};

/// Throws DomainError / FloorError / DegenerateMarket on the first violated bound.
ModelParams validate(const ModelParams& raw);

/// Expects validated input.
DerivedConstants derive_constants(const ModelParams& p);

/// gamma - (gamma - r) p - (theta^2 / 2) p (p - 1)
double characteristic(const ModelParams& p, double theta, double exponent);

/// Floors equal within 1e-12 max(1, |floor|).
bool at_floor(double value, double floor);

}  // namespace retire
