//! Bernoulli coefficients B_{2j}/(2j)! shared by the Euler–Maclaurin
//! evaluators for ζ(s) and ζ(s,a).

/// B_{2j}/(2j)! for j = 1..=16. Equal to (-1)^{j+1} 2 ζ(2j)/(2π)^{2j}.
pub(crate) const B2J_OVER_FACT: [f64; 16] = [
    8.333333333333333e-2,    // B2/2!   = (1/6)/2
    -1.388888888888889e-3,   // B4/4!   = (-1/30)/24
    3.3068783068783064e-5,   // B6/6!   = (1/42)/720
    -8.267195767195768e-7,   // B8/8!
    2.08767569878681e-8,     // B10/10!
    -5.284190138687493e-10,  // B12/12!
    1.338253653068468e-11,   // B14/14!
    -3.3896802963225827e-13, // B16/16!
    8.586062056277845e-15,   // B18/18!
    -2.174868698558062e-16,  // B20/20!
    5.5090028283602295e-18,  // B22/22!
    -1.3954464685812525e-19, // B24/24!
    3.534707039629467e-21,   // B26/26!
    -8.953517427037547e-23,  // B28/28!
    2.267952452337683e-24,   // B30/30!
    -5.744790668872202e-26,  // B32/32!
];
