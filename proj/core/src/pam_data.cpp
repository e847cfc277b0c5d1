#include <string_view>

#include "bayalign/submodel.hpp"

namespace bayalign {

// Keep in sync with core/data/dayhoff_pam1.txt.
std::string_view dayhoff_pam1_text() {
  static constexpr std::string_view kText = R"PAM(# Dayhoff PAM1 mutation probability matrix (Atlas of Protein Sequence and
# Structure, vol. 5 suppl. 3, 1978). Row a, column b holds P(a -> b), the
# probability that amino acid a is replaced by b over one accepted point
# mutation per 100 residues. Printed values are the published x10^4 integers
# divided by 10^4, so rows sum to 1 only to within rounding (+-3e-4).
# The final line holds the equilibrium amino-acid frequencies.
A R N D C Q E G H I L K M F P S T W Y V
0.9867 0.0001 0.0004 0.0006 0.0001 0.0003 0.0010 0.0021 0.0001 0.0002 0.0003 0.0002 0.0001 0.0001 0.0013 0.0028 0.0022 0.0000 0.0001 0.0013
0.0002 0.9913 0.0001 0.0000 0.0001 0.0009 0.0000 0.0001 0.0008 0.0002 0.0001 0.0037 0.0001 0.0001 0.0005 0.0011 0.0002 0.0002 0.0000 0.0002
0.0009 0.0001 0.9822 0.0042 0.0000 0.0004 0.0007 0.0012 0.0018 0.0003 0.0003 0.0025 0.0000 0.0001 0.0002 0.0034 0.0013 0.0000 0.0003 0.0001
0.0010 0.0000 0.0036 0.9859 0.0000 0.0005 0.0056 0.0011 0.0003 0.0001 0.0000 0.0006 0.0000 0.0000 0.0001 0.0007 0.0004 0.0000 0.0000 0.0001
0.0003 0.0001 0.0000 0.0000 0.9973 0.0000 0.0000 0.0001 0.0001 0.0002 0.0000 0.0000 0.0000 0.0000 0.0001 0.0011 0.0001 0.0000 0.0003 0.0003
0.0008 0.0010 0.0004 0.0006 0.0000 0.9876 0.0035 0.0003 0.0020 0.0001 0.0006 0.0012 0.0002 0.0000 0.0008 0.0004 0.0003 0.0000 0.0000 0.0002
0.0017 0.0000 0.0006 0.0053 0.0000 0.0027 0.9865 0.0007 0.0001 0.0002 0.0001 0.0007 0.0000 0.0000 0.0003 0.0006 0.0002 0.0000 0.0001 0.0002
0.0021 0.0000 0.0006 0.0006 0.0000 0.0001 0.0004 0.9935 0.0000 0.0000 0.0001 0.0002 0.0000 0.0001 0.0002 0.0016 0.0002 0.0000 0.0000 0.0003
0.0002 0.0010 0.0021 0.0004 0.0001 0.0023 0.0002 0.0001 0.9912 0.0000 0.0004 0.0002 0.0000 0.0002 0.0005 0.0002 0.0001 0.0000 0.0004 0.0003
0.0006 0.0003 0.0003 0.0001 0.0001 0.0001 0.0003 0.0000 0.0000 0.9872 0.0022 0.0004 0.0005 0.0008 0.0001 0.0002 0.0011 0.0000 0.0001 0.0057
0.0004 0.0001 0.0001 0.0000 0.0000 0.0003 0.0001 0.0001 0.0001 0.0009 0.9947 0.0001 0.0008 0.0006 0.0002 0.0001 0.0002 0.0000 0.0001 0.0011
0.0002 0.0019 0.0013 0.0003 0.0000 0.0006 0.0004 0.0002 0.0001 0.0002 0.0002 0.9926 0.0004 0.0000 0.0002 0.0007 0.0008 0.0000 0.0000 0.0001
0.0006 0.0004 0.0000 0.0000 0.0000 0.0004 0.0001 0.0001 0.0000 0.0012 0.0045 0.0020 0.9874 0.0004 0.0001 0.0004 0.0006 0.0000 0.0000 0.0017
0.0002 0.0001 0.0001 0.0000 0.0000 0.0000 0.0000 0.0001 0.0002 0.0007 0.0013 0.0000 0.0001 0.9946 0.0001 0.0003 0.0001 0.0001 0.0021 0.0001
0.0022 0.0004 0.0002 0.0001 0.0001 0.0006 0.0003 0.0003 0.0003 0.0000 0.0003 0.0003 0.0000 0.0000 0.9926 0.0017 0.0005 0.0000 0.0000 0.0003
0.0035 0.0006 0.0020 0.0005 0.0005 0.0002 0.0004 0.0021 0.0001 0.0001 0.0001 0.0008 0.0001 0.0002 0.0012 0.9840 0.0032 0.0001 0.0001 0.0002
0.0032 0.0001 0.0009 0.0003 0.0001 0.0002 0.0002 0.0003 0.0001 0.0007 0.0003 0.0011 0.0002 0.0001 0.0004 0.0038 0.9871 0.0000 0.0001 0.0010
0.0000 0.0008 0.0001 0.0000 0.0000 0.0000 0.0000 0.0000 0.0001 0.0000 0.0004 0.0000 0.0000 0.0003 0.0000 0.0005 0.0000 0.9976 0.0002 0.0000
0.0002 0.0000 0.0004 0.0000 0.0003 0.0000 0.0001 0.0000 0.0004 0.0001 0.0002 0.0001 0.0000 0.0028 0.0000 0.0002 0.0002 0.0001 0.9945 0.0002
0.0018 0.0001 0.0001 0.0001 0.0002 0.0001 0.0002 0.0005 0.0001 0.0033 0.0015 0.0001 0.0004 0.0000 0.0002 0.0002 0.0009 0.0000 0.0001 0.9901
0.087127 0.040904 0.040432 0.046872 0.033474 0.038255 0.049530 0.088612 0.033618 0.036886 0.085357 0.080482 0.014753 0.039772 0.050680 0.069577 0.058542 0.010494 0.029916 0.064718
)PAM";
  return kText;
}

}  // namespace bayalign
