#include <string_view>

#include "pseudo/labels.hpp"
#include "pseudo/mask_grammar.hpp"

namespace pseudo {

// Built-in descriptor -> tag rules, calibrated against MIMIC-III style
// masks.  The same text is shipped as editable data in
// data/rules_default.tsv; a unit test keeps the two in sync.
static constexpr std::string_view kDefaultRules =
    // Bare date / number forms.
    "10\t^\\d{4}-\\d{1,2}-\\d{1,2}$\tDATE\n"
    "20\t^\\d{1,2}-\\d{1,2}-\\d{4}$\tDATE\n"
    "30\t^\\d{1,2}-\\d{1,2}$\tDATE\n"
    "40\t^\\d{1,2}/\\d{4}$\tDATE\n"
    "50\t^\\d{4}$\tYEAR\n"
    "60\t^\\d+$\tNUMERICID\n"
    // Person names.
    "70\tdoctor first name\tDOCTORFIRSTNAME\n"
    "80\tdoctor last name\tDOCTORLASTNAME\n"
    "90\tfirst name|known firstname\tFIRSTNAME\n"
    "100\tlast name|known lastname\tLASTNAME\n"
    "110\tinitial\tNAME\n"
    // Contact channels before the address / number catch-alls.
    "120\te-?mail\tEMAIL\n"
    "130\turl\tURL\n"
    "140\tpager\tPAGER\n"
    "150\ttelephone|phone|fax\tPHONE\n"
    "160\tholiday\tHOLIDAY\n"
    "170\tage over\tAGE\n"
    // Wards and explicit identifier descriptors before facilities.
    "180\twardname|ward name|hospital unit name\tWARDNAME\n"
    "190\tidentifier|record number|social security|serial number|unit "
    "number|clip number|job number|provider number|md number\tNUMERICID\n"
    "200\thospital|medical center\tHOSPITAL\n"
    "210\tcompany\tCOMPANY\n"
    "220\tuniversity|college\tUNIVERSITY\n"
    "230\t\\bstate\\b\tSTATE\n"
    "240\tcountry\tCOUNTRY\n"
    "250\tlocation|street address|apartment address|po box|address\tLOCATION\n"
    // Calendar descriptors.
    "260\tyear \\(4 digits\\)|^year\\b\tYEAR\n"
    "270\tmonth|day|date\tDATE\n"
    // Leftover numbered and named things.
    "280\tnumber|numeric\tNUMERICID\n"
    "290\t^name\tNAME\n"
    // Terminal catch-all.
    "900\t.*\tUNKNOWN\n";

std::string_view default_rule_table_text() {
    return kDefaultRules;
}

// i2b2-2014 fine-grained labels binned to the HIPAA categories used for
// comparable evaluation.  23 source labels plus the O passthrough; the
// exact binning follows the prior de-identification work and is shipped
// as editable data (data/label_map_hipaa.tsv) so it can be corrected
// without rebuilding.
static constexpr std::string_view kDefaultLabelMap =
    "PATIENT\tNAME\n"
    "DOCTOR\tNAME\n"
    "USERNAME\tNAME\n"
    "PROFESSION\tPROFESSION\n"
    "ROOM\tLOCATION\n"
    "DEPARTMENT\tLOCATION\n"
    "HOSPITAL\tLOCATION\n"
    "ORGANIZATION\tLOCATION\n"
    "STREET\tLOCATION\n"
    "CITY\tLOCATION\n"
    "STATE\tLOCATION\n"
    "COUNTRY\tLOCATION\n"
    "ZIP\tLOCATION\n"
    "LOCATION-OTHER\tLOCATION\n"
    "AGE\tAGE\n"
    "DATE\tDATE\n"
    "PHONE\tCONTACT\n"
    "FAX\tCONTACT\n"
    "EMAIL\tCONTACT\n"
    "URL\tCONTACT\n"
    "IPADDR\tCONTACT\n"
    "MEDICALRECORD\tID\n"
    "IDNUM\tID\n"
    "O\tO\n";

std::string_view default_label_map_text() {
    return kDefaultLabelMap;
}

}  // namespace pseudo
