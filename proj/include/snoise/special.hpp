#pragma once

namespace snoise {

double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace snoise
